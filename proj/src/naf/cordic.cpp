#include "nlpe/naf/cordic.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

namespace nlpe::naf {

namespace {

constexpr int kFracBits = 24;
constexpr int64_t kOne = 1ll << kFracBits;
constexpr int kMaxIterations = 24;
constexpr double kLn2 = 0.6931471805599453;
constexpr double kBf16Max = 3.3895313892515355e38;

int64_t to_fx(double x) { return (int64_t)std::llround(std::ldexp(x, kFracBits)); }
double from_fx(int64_t x) { return std::ldexp((double)x, -kFracBits); }

void check(const CordicConfig& cfg) {
    if (cfg.iterations < 8 || cfg.iterations > kMaxIterations)
        throw std::invalid_argument("cordic iterations out of range");
}

struct HypTables {
    std::array<int64_t, kMaxIterations + 1> atanh_fx{};
    // Rotation gain prefix per shift index: gain[i] = prod over the schedule
    // up to and including index i of sqrt(1 - 2^-2j).
    std::array<double, kMaxIterations + 1> gain{};
};

const HypTables& hyp_tables() {
    static const HypTables t = [] {
        HypTables tt;
        double g = 1.0;
        for (int i = 1; i <= kMaxIterations; ++i) {
            tt.atanh_fx[(size_t)i] = to_fx(std::atanh(std::ldexp(1.0, -i)));
            int reps = (i == 4 || i == 13) ? 2 : 1;
            for (int r = 0; r < reps; ++r) g *= std::sqrt(1.0 - std::ldexp(1.0, -2 * i));
            tt.gain[(size_t)i] = g;
        }
        return tt;
    }();
    return t;
}

// cosh r + sinh r for |r| <= ln2/2, rotation mode over the repeat schedule.
double exp_core(double r, int iterations) {
    const HypTables& t = hyp_tables();
    // the rotation chain scales by gain[n]; start at 1/gain so it cancels
    int64_t x = to_fx(1.0 / t.gain[(size_t)iterations]);
    int64_t y = 0;
    int64_t z = to_fx(r);
    for (int i = 1; i <= iterations; ++i) {
        int reps = (i == 4 || i == 13) ? 2 : 1;
        for (int rep = 0; rep < reps; ++rep) {
            if (z >= 0) {
                int64_t nx = x + (y >> i);
                y = y + (x >> i);
                x = nx;
                z -= t.atanh_fx[(size_t)i];
            } else {
                int64_t nx = x - (y >> i);
                y = y - (x >> i);
                x = nx;
                z += t.atanh_fx[(size_t)i];
            }
        }
    }
    return from_fx(x + y);
}

} // namespace

double cordic_exp(double x, const CordicConfig& cfg, bool* overflow) {
    check(cfg);
    if (overflow) *overflow = false;
    if (x > 89.0) {
        if (overflow) *overflow = true;
        return kBf16Max;
    }
    if (x < -89.0) return 0.0;
    int k = (int)std::lround(x / kLn2);
    double r = x - (double)k * kLn2;
    return std::ldexp(exp_core(r, cfg.iterations), k);
}

double cordic_div(double num, double den, const CordicConfig& cfg, bool* flag) {
    check(cfg);
    if (flag) *flag = false;
    if (den == 0.0) {
        if (flag) *flag = true;
        if (num == 0.0) return 0.0;
        return num > 0 ? kBf16Max : -kBf16Max;
    }
    if (num == 0.0) return 0.0;

    int sign = (num < 0) != (den < 0) ? -1 : 1;
    int kn, kd;
    double mn = 2.0 * std::frexp(std::fabs(num), &kn); // [1,2)
    double md = 2.0 * std::frexp(std::fabs(den), &kd);
    kn -= 1;
    kd -= 1;

    // Linear vectoring; quotient mn/md in (0.5,2) needs the k=0 step. The y
    // register is held wide so x*2^-k stays exact and the residue decisions
    // track the true quotient.
    const int steps = cfg.iterations + 2;
    int64_t x = to_fx(md);
    int64_t y = to_fx(mn) << steps;
    int64_t z = 0;
    for (int k = 0; k < steps; ++k) {
        if (y >= 0) {
            y -= x << (steps - k);
            z += kOne >> k;
        } else {
            y += x << (steps - k);
            z -= kOne >> k;
        }
    }
    return sign * std::ldexp(from_fx(z), kn - kd);
}

} // namespace nlpe::naf

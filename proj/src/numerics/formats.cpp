#include "nlpe/numerics/formats.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace nlpe::numerics {

namespace {

struct FpLayout {
    unsigned ebits;
    unsigned mbits;
    int bias;
    bool has_inf;           // bf16 only
    uint16_t canonical_nan; // 0 where the format has no NaN (fp4)
    uint16_t inf_bits;
    uint16_t max_finite_bits;
    int max_biased_exp;     // largest exponent field usable for finite values
    int max_mant_at_top;    // largest mantissa field at max_biased_exp
};

constexpr FpLayout kFp4 = {2, 1, 1, false, 0x0, 0x0, 0x7, 3, 1};
constexpr FpLayout kFp8 = {4, 3, 7, false, 0x7F, 0x0, 0x7E, 15, 6};
constexpr FpLayout kBf16 = {8, 7, 127, true, 0x7FC0, 0x7F80, 0x7F7F, 254, 127};

const FpLayout& layout(ScalarFormat f) {
    switch (f) {
        case ScalarFormat::Fp4: return kFp4;
        case ScalarFormat::Fp8: return kFp8;
        case ScalarFormat::Bf16: return kBf16;
        default: throw std::invalid_argument("not a float format");
    }
}

double decode_float(uint16_t bits, const FpLayout& L) {
    const unsigned mbits = L.mbits;
    const uint16_t mant_mask = (uint16_t)((1u << mbits) - 1);
    const uint16_t exp_mask = (uint16_t)((1u << L.ebits) - 1);
    int sign = (bits >> (L.ebits + mbits)) & 1;
    int e = (bits >> mbits) & exp_mask;
    int m = bits & mant_mask;
    if (L.has_inf && e == (int)exp_mask) {
        if (m != 0) return std::numeric_limits<double>::quiet_NaN();
        return sign ? -std::numeric_limits<double>::infinity()
                    : std::numeric_limits<double>::infinity();
    }
    if (!L.has_inf && L.canonical_nan != 0 && e == (int)exp_mask && m == (int)mant_mask)
        return std::numeric_limits<double>::quiet_NaN(); // E4M3 NaN slot
    double mag;
    if (e == 0) {
        mag = std::ldexp((double)m, 1 - L.bias - (int)mbits); // subnormal
    } else {
        mag = std::ldexp((double)((1 << mbits) | m), e - L.bias - (int)mbits);
    }
    return sign ? -mag : mag;
}

uint16_t encode_float(double v, const FpLayout& L) {
    const uint16_t sign_mask = (uint16_t)(1u << (L.ebits + L.mbits));
    if (std::isnan(v)) return L.canonical_nan;
    uint16_t s = std::signbit(v) ? sign_mask : 0;
    double a = std::fabs(v);
    if (a == 0.0) return s;
    if (std::isinf(a)) return (uint16_t)(s | (L.has_inf ? L.inf_bits : L.max_finite_bits));

    int e2;
    std::frexp(a, &e2);
    int E = e2 - 1; // a in [2^E, 2^(E+1))
    const int emin = 1 - L.bias;
    const int qexp = (E < emin ? emin : E) - (int)L.mbits;
    long long n = round_nearest_even(std::ldexp(a, -qexp));
    if (n == 0) return s; // underflow to signed zero

    if (E < emin) {
        // subnormal grid; n == 1<<mbits means we rounded up to the min normal
        if (n < (1ll << L.mbits)) return (uint16_t)(s | (uint16_t)n);
        return (uint16_t)(s | (uint16_t)(1u << L.mbits));
    }
    if (n == (1ll << (L.mbits + 1))) { // mantissa carry
        n >>= 1;
        E += 1;
    }
    int be = E + L.bias;
    uint16_t mant = (uint16_t)(n - (1ll << L.mbits));
    if (be > L.max_biased_exp || (be == L.max_biased_exp && mant > L.max_mant_at_top))
        return (uint16_t)(s | (L.has_inf ? L.inf_bits : L.max_finite_bits));
    return (uint16_t)(s | (uint16_t)(be << L.mbits) | mant);
}

uint16_t encode_int(double v, long long lo, long long hi, unsigned width) {
    long long n;
    if (std::isnan(v)) {
        n = 0;
    } else if (std::isinf(v)) {
        n = v > 0 ? hi : lo;
    } else {
        n = round_nearest_even(v);
        if (n < lo) n = lo;
        if (n > hi) n = hi;
    }
    return (uint16_t)((unsigned long long)n & ((1ull << width) - 1));
}

} // namespace

long long round_nearest_even(double x) {
    double f = std::floor(x);
    double r = x - f;
    long long n = (long long)f;
    if (r > 0.5) return n + 1;
    if (r < 0.5) return n;
    return (n % 2 == 0) ? n : n + 1;
}

unsigned bit_width(ScalarFormat f) {
    switch (f) {
        case ScalarFormat::Int4:
        case ScalarFormat::Fp4: return 4;
        case ScalarFormat::Int8:
        case ScalarFormat::Fp8: return 8;
        case ScalarFormat::Bf16: return 16;
        case ScalarFormat::Ref: return 32; // fp32 baseline for accounting
    }
    throw std::invalid_argument("bad format");
}

double max_code_magnitude(ScalarFormat f) {
    switch (f) {
        case ScalarFormat::Int4: return 7.0;
        case ScalarFormat::Int8: return 127.0;
        case ScalarFormat::Fp4: return 6.0;
        case ScalarFormat::Fp8: return 448.0;
        default: throw std::invalid_argument("no code magnitude for format");
    }
}

double max_finite(ScalarFormat f) {
    switch (f) {
        case ScalarFormat::Int4: return 7.0;
        case ScalarFormat::Int8: return 127.0;
        case ScalarFormat::Fp4: return 6.0;
        case ScalarFormat::Fp8: return 448.0;
        case ScalarFormat::Bf16: return decode_float(kBf16.max_finite_bits, kBf16);
        case ScalarFormat::Ref: return std::numeric_limits<double>::max();
    }
    throw std::invalid_argument("bad format");
}

bool is_float_format(ScalarFormat f) {
    return f == ScalarFormat::Fp4 || f == ScalarFormat::Fp8 || f == ScalarFormat::Bf16;
}

const char* format_name(ScalarFormat f) {
    switch (f) {
        case ScalarFormat::Int4: return "int4";
        case ScalarFormat::Int8: return "int8";
        case ScalarFormat::Fp4: return "fp4";
        case ScalarFormat::Fp8: return "fp8";
        case ScalarFormat::Bf16: return "bf16";
        case ScalarFormat::Ref: return "ref";
    }
    return "?";
}

ScalarFormat format_from_name(const std::string& name) {
    for (auto f : {ScalarFormat::Int4, ScalarFormat::Int8, ScalarFormat::Fp4,
                   ScalarFormat::Fp8, ScalarFormat::Bf16, ScalarFormat::Ref})
        if (name == format_name(f)) return f;
    throw std::invalid_argument("unknown format name: " + name);
}

double decode_bits(uint16_t bits, ScalarFormat f) {
    switch (f) {
        case ScalarFormat::Int4: {
            int v = bits & 0xF;
            return (double)(v >= 8 ? v - 16 : v);
        }
        case ScalarFormat::Int8:
            return (double)(int8_t)(bits & 0xFF);
        case ScalarFormat::Fp4:
        case ScalarFormat::Fp8:
        case ScalarFormat::Bf16:
            return decode_float(bits, layout(f));
        case ScalarFormat::Ref:
            throw std::invalid_argument("ref values are not bit-encoded");
    }
    throw std::invalid_argument("bad format");
}

uint16_t encode_bits(double v, ScalarFormat f) {
    switch (f) {
        case ScalarFormat::Int4: return encode_int(v, -8, 7, 4);
        case ScalarFormat::Int8: return encode_int(v, -128, 127, 8);
        case ScalarFormat::Fp4:
        case ScalarFormat::Fp8:
        case ScalarFormat::Bf16:
            return encode_float(v, layout(f));
        case ScalarFormat::Ref:
            throw std::invalid_argument("ref values are not bit-encoded");
    }
    throw std::invalid_argument("bad format");
}

} // namespace nlpe::numerics

#include "nlpe/verify/mac_reference.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "nlpe/numerics/formats.hpp"

namespace nlpe::verify {

using numerics::ScalarFormat;

namespace {

struct RefOperand {
    double value;   // exact decoded value
    int class_exp;  // field-based class exponent (subnormals at 1-bias)
};

RefOperand ref_decode(uint16_t bits, ScalarFormat f) {
    auto split = [&](int ebits, int mbits, int bias) {
        int sign = (bits >> (ebits + mbits)) & 1;
        int e = (int)((bits >> mbits) & ((1u << ebits) - 1));
        int m = (int)(bits & ((1u << mbits) - 1));
        int cls = e == 0 ? 1 - bias : e - bias;
        double mag = e == 0 ? std::ldexp((double)m, 1 - bias - mbits)
                            : std::ldexp((double)((1 << mbits) | m), e - bias - mbits);
        return RefOperand{sign ? -mag : mag, cls};
    };
    switch (f) {
        case ScalarFormat::Int4: {
            int v = bits & 0xF;
            if (v >= 8) v -= 16;
            return RefOperand{(double)v, 0};
        }
        case ScalarFormat::Fp4: return split(2, 1, 1);
        case ScalarFormat::Fp8: return split(4, 3, 7);
        case ScalarFormat::Bf16: return split(8, 7, 127);
        default: throw std::invalid_argument("ref_decode: bad lane format");
    }
}

struct RefTerm {
    double value;  // exact
    int class_exp;
};

struct RefQuire {
    int64_t mant = 0; // W+4 fractional bits when nonzero
    int exp = 0;
    bool exception = false;
};

// Fold one batch of summands into the accumulator.
void ref_accumulate(RefQuire& q, const std::vector<RefTerm>& terms, int W, int out_bias,
                    int out_emax_biased) {
    const int F = W + 4;
    int m = 0;
    bool any = false;
    for (const auto& t : terms)
        if (t.value != 0.0) {
            m = any ? std::max(m, t.class_exp) : t.class_exp;
            any = true;
        }
    if (q.mant != 0) {
        m = any ? std::max(m, q.exp) : q.exp;
        any = true;
    }
    if (!any) return;

    long long sum = 0;
    for (const auto& t : terms) {
        if (t.value == 0.0) continue;
        double scaled = std::ldexp(std::fabs(t.value), F - m); // exact
        long long n = (long long)std::floor(scaled);
        sum += t.value < 0 ? -n : n;
    }
    if (q.mant != 0) {
        double scaled = std::ldexp(std::fabs((double)q.mant), q.exp - m); // exact
        long long n = (long long)std::floor(scaled);
        sum += q.mant < 0 ? -n : n;
    }

    if (sum == 0) {
        q.mant = 0;
        q.exp = 0;
        return;
    }
    long long mag = sum < 0 ? -sum : sum;
    int e = m;
    while (mag >= (1ll << (F + 1))) {
        mag >>= 1;
        ++e;
    }
    while (mag < (1ll << F)) {
        mag <<= 1;
        --e;
    }
    if (e + out_bias > out_emax_biased) {
        q.exception = true;
        e = out_emax_biased - out_bias;
        mag = (1ll << (F + 1)) - 1;
    } else if (e + out_bias < 0) {
        mag = 0;
        e = 0;
    }
    q.mant = sum < 0 ? -mag : mag;
    q.exp = e;
}

RefMacResult ref_read(const RefQuire& q, ScalarFormat out, int W) {
    const int F = W + 4;
    const bool fp8 = out == ScalarFormat::Fp8;
    const int mb = fp8 ? 3 : 7;
    const int bias = fp8 ? 7 : 127;
    const int max_be = fp8 ? 15 : 254;
    const uint16_t sign_bit = fp8 ? 0x80 : 0x8000;
    const uint16_t max_finite = fp8 ? 0x7E : 0x7F7F;
    const int top_mant = fp8 ? 6 : 127;

    RefMacResult r;
    r.quire_value = std::ldexp((double)q.mant, q.exp - F);
    r.exception = q.exception;
    if (q.mant == 0) {
        r.bits = 0;
        return r;
    }
    uint16_t s = q.mant < 0 ? sign_bit : 0;
    long long mag = q.mant < 0 ? -q.mant : q.mant;
    int be = q.exp + bias;
    if (be >= 1) {
        int mant = (int)((mag >> (F - mb)) & ((1 << mb) - 1));
        if (be > max_be || (be == max_be && mant > top_mant)) {
            r.bits = (uint16_t)(s | max_finite);
            r.exception = true;
        } else {
            r.bits = (uint16_t)(s | (be << mb) | mant);
        }
        return r;
    }
    int shift = (F - mb) + (1 - be);
    long long sub = shift >= 63 ? 0 : (mag >> shift);
    r.bits = (uint16_t)(s | (uint16_t)sub);
    return r;
}

} // namespace

RefMacResult reference_dot(std::span<const double> a, std::span<const double> b,
                           mac::MacMode mode, ScalarFormat out, double addend) {
    if (a.size() != b.size() || a.empty())
        throw std::invalid_argument("reference_dot: bad operands");
    const ScalarFormat lf = mac::lane_format(mode);
    const int lanes = mac::lane_count(mode);
    const int W = out == ScalarFormat::Fp8 ? 8 : 16;
    const int bias = out == ScalarFormat::Fp8 ? 7 : 127;
    const int emax_biased = out == ScalarFormat::Fp8 ? 15 : 255;

    RefQuire q;
    const size_t words = (a.size() + (size_t)lanes - 1) / (size_t)lanes;
    for (size_t w = 0; w < words; ++w) {
        std::vector<RefTerm> terms;
        for (int i = 0; i < lanes; ++i) {
            size_t idx = w * (size_t)lanes + (size_t)i;
            if (idx >= a.size()) continue;
            RefOperand oa = ref_decode(numerics::encode_bits(a[idx], lf), lf);
            RefOperand ob = ref_decode(numerics::encode_bits(b[idx], lf), lf);
            terms.push_back(RefTerm{oa.value * ob.value, oa.class_exp + ob.class_exp});
        }
        if (w == 0 && addend != 0.0) {
            uint16_t cb = numerics::encode_bits(addend, out);
            RefOperand oc = ref_decode(cb, out);
            terms.push_back(RefTerm{oc.value, oc.class_exp});
        }
        ref_accumulate(q, terms, W, bias, emax_biased);
    }
    return ref_read(q, out, W);
}

} // namespace nlpe::verify

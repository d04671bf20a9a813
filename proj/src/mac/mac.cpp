#include "nlpe/mac/mac.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace nlpe::mac {

namespace {

using numerics::bit_width;
using numerics::decode_bits;
using numerics::encode_bits;

struct LaneFields {
    int sign;       // 0/1
    uint32_t mant;  // magnitude with hidden bit (fp) or |value| (int4)
    int gexp;       // grid exponent: class exponent of the term
    int mbits;      // fraction bits of mant relative to 2^gexp
};

LaneFields fp_fields(uint16_t bits, ScalarFormat f) {
    switch (f) {
        case ScalarFormat::Fp4: {
            int e = (bits >> 1) & 0x3, m = bits & 0x1;
            if (e == 0) return {(bits >> 3) & 1, (uint32_t)m, 0, 1};
            return {(bits >> 3) & 1, (uint32_t)(2 | m), e - 1, 1};
        }
        case ScalarFormat::Fp8: {
            int e = (bits >> 3) & 0xF, m = bits & 0x7;
            if (e == 0) return {(bits >> 7) & 1, (uint32_t)m, -6, 3};
            return {(bits >> 7) & 1, (uint32_t)(8 | m), e - 7, 3};
        }
        case ScalarFormat::Bf16: {
            int e = (bits >> 7) & 0xFF, m = bits & 0x7F;
            if (e == 0) return {(bits >> 15) & 1, (uint32_t)m, -126, 7};
            return {(bits >> 15) & 1, (uint32_t)(128 | m), e - 127, 7};
        }
        default:
            throw std::logic_error("fp_fields: not a float format");
    }
}

// Mantissa multiply through the 4-bit block array: bf16 uses the 2x2 nibble
// grid, fp8/fp4/int4 magnitudes fit a single block.
uint32_t mant_product(uint32_t ma, uint32_t mb, ScalarFormat f) {
    if (f == ScalarFormat::Bf16) {
        uint32_t ah = ma >> 4, al = ma & 0xF, bh = mb >> 4, bl = mb & 0xF;
        return ((uint32_t)rmmec_multiply((uint8_t)ah, (uint8_t)bh) << 8) +
               ((uint32_t)rmmec_multiply((uint8_t)ah, (uint8_t)bl) << 4) +
               ((uint32_t)rmmec_multiply((uint8_t)al, (uint8_t)bh) << 4) +
               (uint32_t)rmmec_multiply((uint8_t)al, (uint8_t)bl);
    }
    return rmmec_multiply((uint8_t)ma, (uint8_t)mb);
}

// One aligned summand: value = sign * mag * 2^lsb_exp, classed at gexp.
struct Summand {
    int sign;
    uint64_t mag;
    int lsb_exp;
    int gexp;
};

int64_t align(const Summand& s, int m, int frac_bits) {
    int net = s.lsb_exp + frac_bits - m;
    uint64_t a;
    if (net >= 0) {
        a = s.mag << net;
    } else {
        int sh = -net;
        a = sh >= 64 ? 0 : (s.mag >> sh); // discard bits past the window
    }
    return s.sign ? -(int64_t)a : (int64_t)a;
}

struct QuireWindow {
    int bias;
    int max_biased;
};

QuireWindow window_of(const Quire& q) {
    // 4-bit exponent window biased like fp8 output, 8-bit like bf16
    return q.frac_width == 8 ? QuireWindow{7, 15} : QuireWindow{127, 255};
}

} // namespace

uint8_t rmmec_multiply(uint8_t x, uint8_t y) {
    if (x > 15 || y > 15) throw std::invalid_argument("rmmec_multiply: operand exceeds 4 bits");
    return (uint8_t)(x * y);
}

ExpCompare rmmec_compare(std::span<const int> exps) {
    if (exps.empty() || exps.size() > 3)
        throw std::invalid_argument("rmmec_compare: 1..3 exponents");
    ExpCompare r;
    r.n = (int)exps.size();
    r.max_exp = exps[0];
    for (int e : exps) r.max_exp = std::max(r.max_exp, e);
    for (int i = 0; i < r.n; ++i) r.diffs[(size_t)i] = r.max_exp - exps[(size_t)i];
    return r;
}

double Quire::value() const {
    return std::ldexp((double)mant, exp - frac_bits());
}

Quire make_quire(ScalarFormat out) {
    Quire q;
    switch (out) {
        case ScalarFormat::Fp8: q.frac_width = 8; break;
        case ScalarFormat::Bf16: q.frac_width = 16; break;
        default: throw std::invalid_argument("quire output must be fp8 or bf16");
    }
    return q;
}

void mac_step(const MacIssue& issue, Quire& q, std::ostream* trace) {
    if (issue.a.mode != issue.mode || issue.b.mode != issue.mode)
        throw std::invalid_argument("mac_step: operand mode mismatch");
    const ScalarFormat addend_fmt =
        q.frac_width == 8 ? ScalarFormat::Fp8 : ScalarFormat::Bf16;
    if (q.fresh && issue.addend.format != addend_fmt)
        throw std::invalid_argument("mac_step: addend format does not match quire");

    const int F = q.frac_bits();
    const ScalarFormat lf = lane_format(issue.mode);
    const int lanes = lane_count(issue.mode);
    const unsigned width = numerics::bit_width(lf);
    const uint32_t lane_mask = (1u << width) - 1;

    std::array<Summand, 8> terms;
    size_t n_terms = 0;
    for (int i = 0; i < lanes; ++i) {
        uint16_t ba = (uint16_t)((issue.a.raw >> (i * (int)width)) & lane_mask);
        uint16_t bb = (uint16_t)((issue.b.raw >> (i * (int)width)) & lane_mask);
        if (issue.mode == MacMode::Int4x6) {
            int va = ba >= 8 ? (int)ba - 16 : (int)ba;
            int vb = bb >= 8 ? (int)bb - 16 : (int)bb;
            uint32_t p = mant_product((uint32_t)std::abs(va), (uint32_t)std::abs(vb), lf);
            if (p != 0) terms[n_terms++] = {(va < 0) != (vb < 0) ? 1 : 0, p, 0, 0};
        } else {
            LaneFields fa = fp_fields(ba, lf);
            LaneFields fb = fp_fields(bb, lf);
            uint32_t p = mant_product(fa.mant, fb.mant, lf);
            if (p != 0)
                terms[n_terms++] = {fa.sign ^ fb.sign, p,
                                    fa.gexp + fb.gexp - fa.mbits - fb.mbits,
                                    fa.gexp + fb.gexp};
        }
    }
    const bool consume_addend = q.fresh;
    if (consume_addend) {
        LaneFields fc = fp_fields(issue.addend.bits, addend_fmt);
        if (fc.mant != 0)
            terms[n_terms++] = {fc.sign, fc.mant, fc.gexp - fc.mbits, fc.gexp};
    }
    if (q.mant != 0)
        terms[n_terms++] = {q.mant < 0 ? 1 : 0, (uint64_t)std::abs(q.mant), q.exp - F, q.exp};

    q.fresh = false;
    if (n_terms == 0) {
        if (trace) *trace << "mode=" << mode_name(issue.mode) << " all-zero quire_mant="
                          << q.mant << " quire_exp=" << q.exp << " exc=" << q.exception << "\n";
        return;
    }

    int m = terms[0].gexp;
    for (size_t i = 1; i < n_terms; ++i) m = std::max(m, terms[i].gexp);

    int64_t sum = 0;
    for (size_t i = 0; i < n_terms; ++i) sum += align(terms[i], m, F);

    if (trace) {
        *trace << "mode=" << mode_name(issue.mode) << " max_exp=" << m << " shifts=";
        for (size_t i = 0; i < n_terms; ++i)
            *trace << (i ? "," : "") << (m - terms[i].gexp);
    }

    if (sum == 0) {
        q.mant = 0;
        q.exp = 0;
    } else {
        uint64_t mag = (uint64_t)std::abs(sum);
        int k = 63 - std::countl_zero(mag);
        int e;
        if (k > F) {
            mag >>= (k - F);
            e = m + (k - F);
        } else {
            mag <<= (F - k);
            e = m - (F - k);
        }
        const QuireWindow w = window_of(q);
        if (e + w.bias > w.max_biased) {
            q.exception = true;
            e = w.max_biased - w.bias;
            mag = (1ull << (F + 1)) - 1;
        } else if (e + w.bias < 0) {
            mag = 0;
            e = 0;
        }
        q.mant = sum < 0 ? -(int64_t)mag : (int64_t)mag;
        q.exp = e;
    }

    if (trace)
        *trace << " quire_mant=" << q.mant << " quire_exp=" << q.exp
               << " exc=" << q.exception << "\n";
}

MacResult quire_read(const Quire& q, ScalarFormat out) {
    if (out != ScalarFormat::Fp8 && out != ScalarFormat::Bf16)
        throw std::invalid_argument("quire_read: output must be fp8 or bf16");
    const int F = q.frac_bits();
    const int mb = out == ScalarFormat::Fp8 ? 3 : 7;
    const int bias = out == ScalarFormat::Fp8 ? 7 : 127;
    const int max_be = out == ScalarFormat::Fp8 ? 15 : 254;
    const int max_mant_top = out == ScalarFormat::Fp8 ? 6 : 127;
    const uint16_t sign_bit = (uint16_t)(1u << (out == ScalarFormat::Fp8 ? 7 : 15));
    const uint16_t max_finite = out == ScalarFormat::Fp8 ? 0x7E : 0x7F7F;

    if (q.mant == 0) return {EncodedScalar{out, 0}, q.exception};

    const uint16_t s = q.mant < 0 ? sign_bit : 0;
    const uint64_t mag = (uint64_t)std::abs(q.mant); // in [2^F, 2^(F+1))
    int be = q.exp + bias;
    if (be >= 1) {
        uint16_t mant = (uint16_t)((mag >> (F - mb)) & ((1u << mb) - 1));
        if (be > max_be || (be == max_be && mant > max_mant_top))
            return {EncodedScalar{out, (uint16_t)(s | max_finite)}, true};
        return {EncodedScalar{out, (uint16_t)(s | (uint16_t)(be << mb) | mant)}, q.exception};
    }
    // subnormal readout: realign to the output's fixed subnormal grid
    int shift = (F - mb) + (1 - be);
    uint64_t sub = shift >= 64 ? 0 : (mag >> shift);
    return {EncodedScalar{out, (uint16_t)(s | (uint16_t)sub)}, q.exception};
}

DotResult dot_product(std::span<const double> a, std::span<const double> b,
                      MacMode mode, ScalarFormat out, double addend,
                      std::ostream* trace) {
    if (a.size() != b.size()) throw std::invalid_argument("dot_product: length mismatch");
    if (a.empty()) throw std::invalid_argument("dot_product: empty input");

    const ScalarFormat lf = lane_format(mode);
    const int lanes = lane_count(mode);
    const size_t words = (a.size() + (size_t)lanes - 1) / (size_t)lanes;

    Quire q = make_quire(out);
    EncodedScalar c = numerics::encode(addend, out);
    const EncodedScalar zero_c{out, 0};

    const unsigned width = numerics::bit_width(lf);
    uint64_t issues = 0;
    for (size_t w = 0; w < words; ++w) {
        uint32_t ra = 0, rb = 0;
        for (int i = 0; i < lanes; ++i) {
            size_t idx = w * (size_t)lanes + (size_t)i;
            if (idx < a.size()) {
                ra |= (uint32_t)numerics::encode_bits(a[idx], lf) << (i * (int)width);
                rb |= (uint32_t)numerics::encode_bits(b[idx], lf) << (i * (int)width);
            }
        }
        MacIssue issue{SimdWord24{ra, mode}, SimdWord24{rb, mode},
                       w == 0 ? c : zero_c, mode};
        mac_step(issue, q, trace);
        ++issues;
    }
    return DotResult{quire_read(q, out), q, issues};
}

uint64_t mac_cycles(MacMode mode, uint64_t vector_len) {
    if (vector_len < 1) throw std::invalid_argument("mac_cycles: vector_len >= 1");
    uint64_t lanes = (uint64_t)lane_count(mode);
    return (vector_len + lanes - 1) / lanes + 4;
}

const char* mode_name(MacMode m) {
    switch (m) {
        case MacMode::Int4x6: return "int4x6";
        case MacMode::Fp4x6: return "fp4x6";
        case MacMode::Fp8x3: return "fp8x3";
        case MacMode::Bf16x1: return "bf16x1";
    }
    return "?";
}

MacMode mode_from_name(const std::string& name) {
    for (auto m : {MacMode::Int4x6, MacMode::Fp4x6, MacMode::Fp8x3, MacMode::Bf16x1})
        if (name == mode_name(m)) return m;
    throw std::invalid_argument("unknown mac mode: " + name);
}

} // namespace nlpe::mac

#pragma once
// Five-stage SIMD multiply-accumulate datapath. One issue carries two 24-bit
// operand words and, on the first step of a dot product, an 8/16-bit addend.
//
// Stage model (one mac_step):
//   1. lane multiply: mantissas-with-hidden-bit via 4-bit RMMEC nibble
//      products (bf16 lanes use a 2x2 nibble grid, fp8/fp4 one block, int4
//      lanes multiply sign-magnitude); product exponent = ea + eb with the
//      subnormal grid exponent fixed at 1-bias; int4 products sit on grid
//      exponent 0
//   2. exponent compare: m = max exponent over nonzero summands (lane
//      products, the quire when nonzero, the addend on the first step)
//   3. shift-align: every magnitude right-shifted onto the 2^(m-F) grid,
//      F = W+4 fractional bits; shifted-out bits are discarded
//   4. signed sum of the aligned terms (lane sign = XOR of operand signs)
//   5. normalize by leading-zero count back to F fractional bits; the quire
//      exponent window is the output format's biased range: overflow sets the
//      exception flag and saturates, underflow flushes to zero
//
// The quire register keeps W in {8,16} fractional bits (+4 guard) and a 4/8
// bit exponent window depending on whether results are read back as FP8 or
// BF16.

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "nlpe/mac/mac_mode.hpp"
#include "nlpe/numerics/simd_word.hpp"

namespace nlpe::mac {

using numerics::EncodedScalar;
using numerics::ScalarFormat;
using numerics::SimdWord24;

// The 4-bit reconfigurable block runs one face per cycle, selected by the
// mode control signal.
enum class RmmecBlockMode { Multiply, ExpCompare };

struct RmmecConfig {
    RmmecBlockMode block_mode = RmmecBlockMode::Multiply;
};

// Multiplier face: exact 8-bit partial product.
uint8_t rmmec_multiply(uint8_t x, uint8_t y);

// Comparator face: max exponent and per-input differences (n <= 3).
struct ExpCompare {
    int max_exp = 0;
    std::array<int, 3> diffs{};
    int n = 0;
};
ExpCompare rmmec_compare(std::span<const int> exps);

struct Quire {
    int64_t mant = 0;      // signed, F = frac_width+4 fractional bits when normalized
    int32_t exp = 0;       // unbiased
    bool exception = false;
    bool fresh = true;     // no mac_step executed yet; addend pending
    uint8_t frac_width = 16; // W: 8 for FP8 readout, 16 for BF16

    int frac_bits() const { return frac_width + 4; }
    // Exact accumulated value (always representable in double).
    double value() const;
};

Quire make_quire(ScalarFormat out);

struct MacIssue {
    SimdWord24 a;
    SimdWord24 b;
    EncodedScalar addend; // fp8 or bf16, consumed on the first step only
    MacMode mode = MacMode::Int4x6;
};

// Optional per-step trace sink, one line per step:
// mode, max exponent, per-lane shift amounts, quire state.
void mac_step(const MacIssue& issue, Quire& q, std::ostream* trace = nullptr);

struct MacResult {
    EncodedScalar value;
    bool exception = false;
};

// Truncating readout: top mantissa bits retained, exponent rebias, saturate
// to max finite (exception) on range overflow.
MacResult quire_read(const Quire& q, ScalarFormat out);

struct DotResult {
    MacResult result;
    Quire quire;       // final accumulator state, pre-readout
    uint64_t issues = 0;
};

// Encode the inputs for the mode (zero-padded to a whole number of words),
// run mac_step per word pair, read out. Deterministic.
DotResult dot_product(std::span<const double> a, std::span<const double> b,
                      MacMode mode, ScalarFormat out,
                      double addend = 0.0, std::ostream* trace = nullptr);

// Linear 5-deep pipeline, one issue per cycle.
uint64_t mac_cycles(MacMode mode, uint64_t vector_len);

} // namespace nlpe::mac

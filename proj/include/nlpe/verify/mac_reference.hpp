#pragma once
// Independent align-to-max / truncate-at-W+4 reference for the SIMD MAC.
// Works in value space (exact double products, ldexp/floor alignment) rather
// than through the staged nibble datapath. Shares only the documented
// accumulator conventions:
//   - summand class exponent: field-based, subnormal operands class at
//     1-bias; products class at ea+eb; int4 products class at 0
//   - zero summands are excluded from the max-exponent search
//   - the addend joins the first step as one more summand
//   - alignment truncates magnitudes onto the 2^(m-(W+4)) grid
//   - normalization keeps W+4 fractional bits; the exponent window is the
//     output format's biased range; overflow saturates and sets the flag,
//     underflow flushes to zero
//   - readout truncates the mantissa, saturating to max finite (flag) when
//     the exponent leaves the output range or hits the fp8 NaN slot

#include <cstdint>
#include <span>

#include "nlpe/mac/mac_mode.hpp"

namespace nlpe::verify {

struct RefMacResult {
    uint16_t bits = 0;
    bool exception = false;
    double quire_value = 0.0;
};

RefMacResult reference_dot(std::span<const double> a, std::span<const double> b,
                           mac::MacMode mode, numerics::ScalarFormat out,
                           double addend = 0.0);

} // namespace nlpe::verify

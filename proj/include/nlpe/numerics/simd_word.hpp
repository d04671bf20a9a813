#pragma once
#include <cstdint>
#include <vector>

#include "nlpe/mac/mac_mode.hpp"
#include "nlpe/numerics/formats.hpp"

namespace nlpe::numerics {

// One 24-bit MAC operand. Lane placement:
//   Int4x6/Fp4x6: lanes 0..5 at bit offsets 0,4,8,12,16,20
//   Fp8x3:        lanes 0..2 at offsets 0,8,16
//   Bf16x1:       lane 0 at offset 0, bits 16..23 zero
struct SimdWord24 {
    uint32_t raw = 0; // low 24 bits
    mac::MacMode mode = mac::MacMode::Int4x6;
};

// Throws std::invalid_argument on lane-count or format mismatch.
SimdWord24 pack(const std::vector<EncodedScalar>& lanes, mac::MacMode mode);
std::vector<EncodedScalar> unpack(const SimdWord24& w);

} // namespace nlpe::numerics

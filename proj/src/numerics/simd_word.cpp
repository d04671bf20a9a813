#include "nlpe/numerics/simd_word.hpp"

#include <stdexcept>

namespace nlpe::numerics {

SimdWord24 pack(const std::vector<EncodedScalar>& lanes, mac::MacMode mode) {
    const int n = mac::lane_count(mode);
    const ScalarFormat f = mac::lane_format(mode);
    if ((int)lanes.size() != n)
        throw std::invalid_argument("pack: lane count does not match mode");
    const unsigned width = bit_width(f);
    uint32_t raw = 0;
    for (int i = 0; i < n; ++i) {
        if (lanes[i].format != f)
            throw std::invalid_argument("pack: lane format does not match mode");
        raw |= (uint32_t)(lanes[i].bits & ((1u << width) - 1)) << (i * width);
    }
    return SimdWord24{raw & 0xFFFFFFu, mode};
}

std::vector<EncodedScalar> unpack(const SimdWord24& w) {
    const int n = mac::lane_count(w.mode);
    const ScalarFormat f = mac::lane_format(w.mode);
    const unsigned width = bit_width(f);
    std::vector<EncodedScalar> lanes(n);
    for (int i = 0; i < n; ++i)
        lanes[i] = EncodedScalar{f, (uint16_t)((w.raw >> (i * width)) & ((1u << width) - 1))};
    return lanes;
}

} // namespace nlpe::numerics

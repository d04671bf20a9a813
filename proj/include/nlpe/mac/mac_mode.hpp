#pragma once
#include <string>

#include "nlpe/numerics/formats.hpp"

namespace nlpe::mac {

// Lane configuration of the 24-bit SIMD MAC input word:
// 6x INT4, 6x FP4, 3x FP8 or 1x BF16 per issue.
enum class MacMode { Int4x6, Fp4x6, Fp8x3, Bf16x1 };

constexpr int lane_count(MacMode m) {
    switch (m) {
        case MacMode::Int4x6:
        case MacMode::Fp4x6: return 6;
        case MacMode::Fp8x3: return 3;
        case MacMode::Bf16x1: return 1;
    }
    return 0;
}

constexpr numerics::ScalarFormat lane_format(MacMode m) {
    switch (m) {
        case MacMode::Int4x6: return numerics::ScalarFormat::Int4;
        case MacMode::Fp4x6: return numerics::ScalarFormat::Fp4;
        case MacMode::Fp8x3: return numerics::ScalarFormat::Fp8;
        case MacMode::Bf16x1: return numerics::ScalarFormat::Bf16;
    }
    return numerics::ScalarFormat::Int4;
}

const char* mode_name(MacMode m);
MacMode mode_from_name(const std::string& name);

} // namespace nlpe::mac

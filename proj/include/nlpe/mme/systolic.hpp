#pragma once
// Output-stationary systolic array emulator. Values are produced through the
// SIMD MAC dot-product path element for element, so results are bit-identical
// for any array geometry; the geometry only shapes the cycle statistics.

#include <cstdint>
#include <string>
#include <vector>

#include "nlpe/mac/mac.hpp"
#include "nlpe/numerics/tensor.hpp"

namespace nlpe::mme {

using mac::MacMode;
using numerics::ScalarFormat;
using numerics::Tensor;

struct ArrayGeometry {
    uint32_t rows = 8;
    uint32_t cols = 8;
};

struct MmeStats {
    uint64_t cycles = 0;
    uint64_t mac_ops = 0;     // SIMD MAC issues
    double utilization = 0.0; // mac_ops / (cycles * rows * cols)
};

// One matmul invocation: tile grid over (M,N), K depth in issue words, and
// the injection skew of the output-stationary schedule.
struct TilePlan {
    uint32_t m_tiles = 0;
    uint32_t n_tiles = 0;
    uint64_t k_words = 0;
    uint32_t skew = 0;
    uint64_t cycles = 0;
};

// Per tile: K/lane_count issue steps plus the rows+cols-1 injection skew;
// tiles run serially on one array; +4 global pipeline fill.
uint64_t cycle_model(uint64_t m, uint64_t k, uint64_t n, ArrayGeometry g, MacMode mode);

struct MatmulResult {
    Tensor c; // M x N in the output format, exception flags dropped
    MmeStats stats;
};

// C[i][j] = dot_product(row_i(A), col_j(B), mode, out), bit-exact. A is MxK,
// B is KxN, both in the mode's lane format (block scales, when present, are
// applied to the streamed values).
MatmulResult matmul(const Tensor& a, const Tensor& b, MacMode mode,
                    ScalarFormat out, ArrayGeometry g);

struct MultiheadSchedule {
    std::vector<TilePlan> plans; // two matmuls per head: QK^T then PV
    uint64_t total_cycles = 0;
};

// Serialized per-head attention matmuls on one array, bf16 single-lane issue.
MultiheadSchedule multihead_schedule(uint32_t heads, uint32_t seq, uint32_t d_head,
                                     ArrayGeometry g);

// One-line JSON export: {M,K,N,rows,cols,mode,cycles,mac_ops,utilization}.
std::string stats_record(uint64_t m, uint64_t k, uint64_t n, ArrayGeometry g,
                         MacMode mode, const MmeStats& stats);

} // namespace nlpe::mme

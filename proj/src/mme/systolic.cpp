#include "nlpe/mme/systolic.hpp"

#include <stdexcept>

#include <json.hpp>

namespace nlpe::mme {

namespace {

uint64_t ceil_div(uint64_t a, uint64_t b) { return (a + b - 1) / b; }

TilePlan plan_of(uint64_t m, uint64_t k, uint64_t n, ArrayGeometry g, MacMode mode) {
    TilePlan p;
    p.m_tiles = (uint32_t)ceil_div(m, g.rows);
    p.n_tiles = (uint32_t)ceil_div(n, g.cols);
    p.k_words = ceil_div(k, (uint64_t)mac::lane_count(mode));
    p.skew = g.rows + g.cols - 1;
    p.cycles = (uint64_t)p.m_tiles * p.n_tiles * (p.k_words + p.skew) + 4;
    return p;
}

} // namespace

uint64_t cycle_model(uint64_t m, uint64_t k, uint64_t n, ArrayGeometry g, MacMode mode) {
    if (m < 1 || k < 1 || n < 1) throw std::invalid_argument("cycle_model: positive dims");
    if (g.rows < 1 || g.cols < 1) throw std::invalid_argument("cycle_model: bad geometry");
    return plan_of(m, k, n, g, mode).cycles;
}

MatmulResult matmul(const Tensor& a, const Tensor& b, MacMode mode,
                    ScalarFormat out, ArrayGeometry g) {
    if (a.dims().size() != 2 || b.dims().size() != 2)
        throw std::invalid_argument("matmul: operands must be 2-d");
    const uint64_t m = a.dims()[0], k = a.dims()[1];
    const uint64_t kb = b.dims()[0], n = b.dims()[1];
    if (k != kb) throw std::invalid_argument("matmul: inner dimension mismatch");
    const ScalarFormat lf = mac::lane_format(mode);
    if (a.format() != lf || b.format() != lf)
        throw std::invalid_argument("matmul: operand format does not match mode");

    MatmulResult r;
    r.c = Tensor::zeros({(uint32_t)m, (uint32_t)n}, out);

    std::vector<double> row(k), col(k);
    for (uint64_t i = 0; i < m; ++i) {
        for (uint64_t x = 0; x < k; ++x) row[x] = a.value_at(i * k + x);
        for (uint64_t j = 0; j < n; ++j) {
            for (uint64_t x = 0; x < k; ++x) col[x] = b.value_at(x * n + j);
            auto dot = mac::dot_product(row, col, mode, out);
            r.c.set_code(i * n + j, dot.result.value.bits);
        }
    }

    TilePlan p = plan_of(m, k, n, g, mode);
    r.stats.cycles = p.cycles;
    r.stats.mac_ops = m * n * p.k_words;
    r.stats.utilization =
        (double)r.stats.mac_ops / ((double)r.stats.cycles * g.rows * g.cols);
    return r;
}

MultiheadSchedule multihead_schedule(uint32_t heads, uint32_t seq, uint32_t d_head,
                                     ArrayGeometry g) {
    MultiheadSchedule s;
    if (heads == 0) return s;
    if (seq < 1 || d_head < 1) throw std::invalid_argument("multihead_schedule: bad dims");
    for (uint32_t h = 0; h < heads; ++h) {
        TilePlan qk = plan_of(seq, d_head, seq, g, MacMode::Bf16x1); // Q.K^T
        TilePlan pv = plan_of(seq, seq, d_head, g, MacMode::Bf16x1); // P.V
        s.total_cycles += qk.cycles + pv.cycles;
        s.plans.push_back(qk);
        s.plans.push_back(pv);
    }
    return s;
}

std::string stats_record(uint64_t m, uint64_t k, uint64_t n, ArrayGeometry g,
                         MacMode mode, const MmeStats& stats) {
    nlohmann::ordered_json j;
    j["M"] = m;
    j["K"] = k;
    j["N"] = n;
    j["rows"] = g.rows;
    j["cols"] = g.cols;
    j["mode"] = mac::mode_name(mode);
    j["cycles"] = stats.cycles;
    j["mac_ops"] = stats.mac_ops;
    j["utilization"] = stats.utilization;
    return j.dump();
}

} // namespace nlpe::mme

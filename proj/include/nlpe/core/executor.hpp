#pragma once
// Instruction-driven orchestration of the memory units, the matrix engine and
// the nonlinear vector array. Functional results are computed strictly in
// program order; the timing walk may overlap one transfer with one compute
// when they touch disjoint buffers (double buffering), contributing
// max(transfer, compute) instead of the sum. SYNC is a barrier.

#include <cstdint>
#include <string>
#include <vector>

#include "nlpe/core/program.hpp"
#include "nlpe/mme/systolic.hpp"
#include "nlpe/numerics/tensor_io.hpp"
#include "nlpe/util/kv.hpp"

namespace nlpe::core {

struct BufferSpec {
    std::string id;
    uint64_t capacity = 0; // bytes
    std::string role;      // input | weight | output | scratchpad
};

struct MemoryModel {
    uint64_t offchip_latency = 100; // cycles per transaction
    uint64_t bandwidth = 16;        // bytes per cycle
};

struct ExecConfig {
    double clock_mhz = 250.0;
    MemoryModel mem;
    mme::ArrayGeometry geometry{8, 8};
    double mac_pj = 10.43;
    double naf_pj = 987.0;
    int naf_iterations = 16;
    bool overlap = true;
    std::vector<BufferSpec> buffers = {
        {"input", 1 << 20, "input"},
        {"weight", 1 << 20, "weight"},
        {"output", 1 << 20, "output"},
        {"scratchpad", 1 << 20, "scratchpad"},
    };
    // tensors staged on-chip before the program starts: {tensor, buffer}
    std::vector<std::pair<std::string, std::string>> preload;
};

ExecConfig config_from_kv(const util::KvMap& kv);

struct PerfCounters {
    uint64_t total_cycles = 0;
    uint64_t mru_busy = 0;
    uint64_t mme_busy = 0;
    uint64_t nmv_busy = 0;
    uint64_t mwu_busy = 0;
    uint64_t bytes_moved = 0;
    uint64_t mac_ops = 0;
    uint64_t naf_ops = 0;
    double energy_pj = 0.0;
};

struct ExecResult {
    numerics::TensorMap outputs; // STORE-bound tensors
    PerfCounters counters;
};

// One-line JSON export of the counters.
std::string counters_record(const PerfCounters& c);

// Throws on unresolved operands and on buffer capacity overflow.
ExecResult execute(const Program& program, const numerics::TensorMap& offchip,
                   const ExecConfig& cfg);

struct PerfSummary {
    double tokens_per_s = 0.0;
    double gops = 0.0;
    double energy_pj = 0.0;
    double pj_per_op = 0.0;
};

// tokens/s = clock / cycles-per-token; GOPS = ops * clock / total cycles.
// A zero-op, zero-cycle run reports zeros; zero cycles with work is an error.
PerfSummary report(const PerfCounters& c, double clock_mhz, double tokens);

} // namespace nlpe::core

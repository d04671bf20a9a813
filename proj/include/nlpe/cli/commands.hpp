#pragma once
// Benchmark subcommand implementations, kept out of main() so tests can
// drive them directly. Every command returns its report and whether the
// thresholds it owns passed; the binary's exit code follows thresholds_ok.

#include <cstdint>
#include <string>
#include <vector>

#include "nlpe/core/executor.hpp"
#include "nlpe/util/report.hpp"

namespace nlpe::cli {

struct RunConfig {
    uint64_t seed = 42;
    std::string out_path;        // empty: stdout only
    std::string format = "json"; // json | csv
    core::ExecConfig exec;
};

struct CommandResult {
    util::Report report;
    bool thresholds_ok = true;
    std::string text_output;  // extra human output (decoded tokens etc.)
    std::string csv_override; // command-specific csv schema, when one exists
};

// Oracle-equivalence suites for the MAC. mode: one of the lane modes or
// "all". Mismatch counts must be zero.
CommandResult cmd_mac_verify(uint64_t trials, const std::string& mode,
                             const RunConfig& rc);

// Error grid vs the high-precision reference. kind "all" sweeps every scalar
// kind plus the softmax row-sum check. Thresholds apply at the calibration
// point (16 iterations, bf16).
CommandResult cmd_naf_sweep(const std::string& kind, const std::string& precision,
                            int iterations, const RunConfig& rc);

// workload "gemm" (M,K,N cycle/emulation study across lane modes) or
// "transformer" (layer programs for the toy model through the executor).
struct PerfSpec {
    std::string workload = "gemm";
    uint64_t m = 64, k = 600, n = 64;
    std::string mode = "bf16x1"; // transformer workload lane mode
    uint32_t seq = 8;
    uint32_t layers = 6;
};
CommandResult cmd_perf(const PerfSpec& spec, const RunConfig& rc);

// Footprint table for the full-scale parameter count and the toy model.
CommandResult cmd_size_report(double params, uint32_t block_size, const RunConfig& rc);

// Greedy decode through the chosen precision with paired-run agreement
// against Ref; batch > 0 adds seeded random sequences.
CommandResult cmd_translate_toy(const std::vector<int>& src_tokens,
                                const std::string& precision, uint32_t max_len,
                                uint32_t batch, const RunConfig& rc);

// Serialize (json or csv per rc.format) and write atomically when out_path
// is set. Returns the serialized text.
std::string emit_report(const CommandResult& r, const RunConfig& rc);

} // namespace nlpe::cli

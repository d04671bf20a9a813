// Benchmark front end for the engine emulator. Exit code 0 when every
// threshold owned by the invoked command passes, 1 on a failed threshold,
// 2 on usage errors.

#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nlpe/cli/commands.hpp"
#include "nlpe/util/kv.hpp"

namespace {

std::vector<int> parse_tokens(const std::string& text) {
    std::vector<int> out;
    std::istringstream is(text);
    int v;
    while (is >> v) out.push_back(v);
    return out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"nlpe-bench: quantized NLP engine emulator workloads"};
    app.require_subcommand(1);
    app.fallthrough(); // global flags may follow the subcommand

    nlpe::cli::RunConfig rc;
    std::string config_path;
    app.add_option("--seed", rc.seed, "rng seed");
    app.add_option("--config", config_path, "key=value config file");
    app.add_option("--out", rc.out_path, "report output path (atomic write)");
    app.add_option("--format", rc.format, "report format: json|csv")
        ->check(CLI::IsMember({"json", "csv"}));

    auto* mac = app.add_subcommand("mac-verify", "oracle equivalence for the SIMD MAC");
    uint64_t trials = 100000;
    std::string mode = "all";
    mac->add_option("--trials", trials, "trials per mode");
    mac->add_option("--mode", mode, "int4x6|fp4x6|fp8x3|bf16x1|all");

    auto* naf = app.add_subcommand("naf-sweep", "activation accuracy grid");
    std::string kind = "all", precision = "bf16";
    int iterations = 16;
    naf->add_option("--kind", kind, "sigmoid|tanh|relu|gelu|swish|selu|softmax|all");
    naf->add_option("--precision", precision, "bf16|fp8");
    naf->add_option("--iterations", iterations, "cordic iterations");

    auto* perf = app.add_subcommand("perf", "cycle/energy model workloads");
    nlpe::cli::PerfSpec spec;
    perf->add_option("--workload", spec.workload, "gemm|transformer|none");
    perf->add_option("--m", spec.m);
    perf->add_option("--k", spec.k);
    perf->add_option("--n", spec.n);
    perf->add_option("--mode", spec.mode, "lane mode for the emulated pass");
    perf->add_option("--seq", spec.seq, "transformer sequence length");
    perf->add_option("--layers", spec.layers, "transformer layer count");

    auto* size = app.add_subcommand("size-report", "deployment footprint table");
    double params = 600e6;
    uint32_t block = 64;
    size->add_option("--params", params, "parameter count");
    size->add_option("--block", block, "quantization block size");

    auto* tr = app.add_subcommand("translate-toy", "greedy decode agreement study");
    std::string src_text, tr_precision = "ref";
    uint32_t max_len = 8, batch = 0;
    tr->add_option("--src", src_text, "whitespace-separated token ids")->required();
    tr->add_option("--precision", tr_precision, "ref|int4|fp4|fp8|bf16");
    tr->add_option("--max-len", max_len);
    tr->add_option("--batch", batch, "extra seeded sequences for agreement stats");

    CLI11_PARSE(app, argc, argv);

    try {
        if (!config_path.empty())
            rc.exec = nlpe::core::config_from_kv(nlpe::util::load_kv(config_path));

        nlpe::cli::CommandResult res;
        if (*mac) {
            res = nlpe::cli::cmd_mac_verify(trials, mode, rc);
        } else if (*naf) {
            res = nlpe::cli::cmd_naf_sweep(kind, precision, iterations, rc);
        } else if (*perf) {
            res = nlpe::cli::cmd_perf(spec, rc);
        } else if (*size) {
            res = nlpe::cli::cmd_size_report(params, block, rc);
        } else if (*tr) {
            res = nlpe::cli::cmd_translate_toy(parse_tokens(src_text), tr_precision,
                                               max_len, batch, rc);
        }
        std::cout << nlpe::cli::emit_report(res, rc);
        if (!res.text_output.empty()) std::cout << res.text_output;
        return res.thresholds_ok ? 0 : 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

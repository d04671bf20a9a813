#include "nlpe/cli/commands.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "nlpe/mac/mac.hpp"
#include "nlpe/model/transformer.hpp"
#include "nlpe/naf/naf.hpp"
#include "nlpe/util/rng.hpp"
#include "nlpe/verify/mac_reference.hpp"

namespace nlpe::cli {

namespace {

using numerics::ScalarFormat;
using numerics::Tensor;
using util::Provenance;

util::Report new_report(const std::string& command) {
    util::Report r;
    r.command = command;
    r.generated_at = util::timestamp_utc();
    return r;
}

bool check_row(util::Report& rep, const std::string& name, bool ok) {
    rep.add("threshold." + name, ok ? 1.0 : 0.0, "bool", Provenance::Measured);
    return ok;
}

// --- mac-verify ------------------------------------------------------------

struct TrialCounts {
    uint64_t trials = 0;
    uint64_t mismatches = 0;
};

TrialCounts verify_int4(uint64_t trials, util::Rng& rng) {
    TrialCounts tc;
    const size_t lens[3] = {6, 12, 24};
    for (uint64_t t = 0; t < trials; ++t) {
        size_t len = lens[t % 3];
        std::vector<double> a(len), b(len);
        long long exact = 0;
        for (size_t i = 0; i < len; ++i) {
            a[i] = (double)rng.uniform_int(-8, 7);
            b[i] = (double)rng.uniform_int(-8, 7);
            exact += (long long)a[i] * (long long)b[i];
        }
        auto dot = mac::dot_product(a, b, mac::MacMode::Int4x6, ScalarFormat::Bf16);
        ++tc.trials;
        if (std::llabs(exact) < (1ll << 16) && dot.quire.value() != (double)exact)
            ++tc.mismatches;
    }
    // exhaustive corner lanes against rotations of the same pattern
    const int corner[5] = {-8, -1, 0, 1, 7};
    for (int c0 = 0; c0 < 5; ++c0)
        for (int c1 = 0; c1 < 5; ++c1)
            for (int c2 = 0; c2 < 5; ++c2)
                for (int c3 = 0; c3 < 5; ++c3)
                    for (int c4 = 0; c4 < 5; ++c4)
                        for (int c5 = 0; c5 < 5; ++c5) {
                            std::vector<double> a{(double)corner[c0], (double)corner[c1],
                                                  (double)corner[c2], (double)corner[c3],
                                                  (double)corner[c4], (double)corner[c5]};
                            std::vector<double> b(a.rbegin(), a.rend());
                            long long exact = 0;
                            for (size_t i = 0; i < 6; ++i)
                                exact += (long long)a[i] * (long long)b[i];
                            auto dot = mac::dot_product(a, b, mac::MacMode::Int4x6,
                                                        ScalarFormat::Bf16);
                            ++tc.trials;
                            if (dot.quire.value() != (double)exact) ++tc.mismatches;
                        }
    return tc;
}

TrialCounts verify_fp(mac::MacMode mode, uint64_t trials, util::Rng& rng) {
    TrialCounts tc;
    for (uint64_t t = 0; t < trials; ++t) {
        ScalarFormat out = (t % 2) ? ScalarFormat::Fp8 : ScalarFormat::Bf16;
        size_t len = (size_t)mac::lane_count(mode) * (1 + t % 5);
        std::vector<double> a(len), b(len);
        for (size_t i = 0; i < len; ++i) {
            a[i] = rng.normal(0, 8.0);
            b[i] = rng.normal(0, 8.0);
        }
        double addend = (t % 4 == 0) ? rng.normal(0, 2.0) : 0.0;
        auto dut = mac::dot_product(a, b, mode, out, addend);
        auto ref = verify::reference_dot(a, b, mode, out, addend);
        ++tc.trials;
        if (dut.result.value.bits != ref.bits || dut.result.exception != ref.exception ||
            dut.quire.value() != ref.quire_value)
            ++tc.mismatches;
    }
    return tc;
}

} // namespace

CommandResult cmd_mac_verify(uint64_t trials, const std::string& mode,
                             const RunConfig& rc) {
    if (trials < 1) throw std::invalid_argument("mac-verify: trials >= 1");
    CommandResult res;
    res.report = new_report("mac-verify");
    util::Rng rng(rc.seed);

    auto run_mode = [&](const std::string& name) {
        TrialCounts tc;
        if (name == "int4x6") {
            tc = verify_int4(trials, rng);
        } else {
            tc = verify_fp(mac::mode_from_name(name), trials, rng);
        }
        res.report.add("trials." + name, (double)tc.trials, "count", Provenance::Measured);
        res.report.add("mismatches." + name, (double)tc.mismatches, "count",
                       Provenance::Measured);
        res.thresholds_ok &= check_row(res.report, "mismatches." + name, tc.mismatches == 0);
    };

    if (mode == "all") {
        for (const char* m : {"int4x6", "fp4x6", "fp8x3", "bf16x1"}) run_mode(m);
    } else {
        run_mode(mode);
    }
    return res;
}

// --- naf-sweep ---------------------------------------------------------------

CommandResult cmd_naf_sweep(const std::string& kind, const std::string& precision,
                            int iterations, const RunConfig& rc) {
    CommandResult res;
    res.report = new_report("naf-sweep");
    naf::CordicConfig cfg{iterations, numerics::format_from_name(precision)};
    const bool at_calibration = iterations == 16 && cfg.io == ScalarFormat::Bf16;

    std::ostringstream csv;
    csv << "kind,precision,iterations,max_abs_err,mean_abs_err\n";

    std::vector<naf::NafKind> kinds;
    if (kind == "all") {
        kinds = {naf::NafKind::Sigmoid, naf::NafKind::Tanh, naf::NafKind::ReLU,
                 naf::NafKind::GeLU, naf::NafKind::Swish, naf::NafKind::Selu};
    } else if (kind != "softmax") {
        kinds = {naf::naf_from_name(kind)};
    }

    for (auto k : kinds) {
        auto row = naf::accuracy_sweep(k, cfg);
        std::string kn = naf::naf_name(k);
        res.report.add(kn + ".max_abs_err", row.max_abs_err, "abs", Provenance::Measured);
        res.report.add(kn + ".mean_abs_err", row.mean_abs_err, "abs", Provenance::Measured);
        csv << kn << ',' << precision << ',' << iterations << ',' << row.max_abs_err
            << ',' << row.mean_abs_err << '\n';
        if (at_calibration) {
            double bound = (k == naf::NafKind::Sigmoid || k == naf::NafKind::Tanh) ? 2e-3
                           : (k == naf::NafKind::GeLU || k == naf::NafKind::Swish)
                               ? 5e-3
                               : (k == naf::NafKind::ReLU ? 0.0 : 1e9);
            res.thresholds_ok &=
                check_row(res.report, kn + ".max_abs_err", row.max_abs_err <= bound);
        }
    }

    if (kind == "all" || kind == "softmax") {
        util::Rng rng(rc.seed);
        double worst = 0.0;
        for (int t = 0; t < 1000; ++t) {
            size_t n = (size_t)rng.uniform_int(2, 64);
            std::vector<double> xs(n);
            for (auto& x : xs) x = rng.normal(0, 5.0);
            auto sm = naf::softmax(xs, cfg);
            double sum = 0;
            for (double v : sm) sum += v;
            worst = std::max(worst, std::fabs(sum - 1.0));
        }
        res.report.add("softmax.row_sum_max_err", worst, "abs", Provenance::Measured);
        csv << "softmax," << precision << ',' << iterations << ',' << worst << ",0\n";
        res.thresholds_ok &= check_row(res.report, "softmax.row_sum_max_err", worst <= 1e-3);
    }

    res.csv_override = csv.str();
    return res;
}

// --- perf --------------------------------------------------------------------

namespace {

Tensor seeded_code_tensor(util::Rng& rng, uint32_t r, uint32_t c, ScalarFormat f) {
    Tensor t = Tensor::zeros({r, c}, f);
    for (uint64_t i = 0; i < t.numel(); ++i)
        t.set_code(i, numerics::encode_bits(rng.normal(0, 1.0), f));
    return t;
}

void perf_gemm(const PerfSpec& spec, const RunConfig& rc, CommandResult& res) {
    const auto g = rc.exec.geometry;
    uint64_t cycles_bf16 = 0;
    for (auto m : {mac::MacMode::Bf16x1, mac::MacMode::Fp8x3, mac::MacMode::Int4x6,
                   mac::MacMode::Fp4x6}) {
        uint64_t cycles = mme::cycle_model(spec.m, spec.k, spec.n, g, m);
        res.report.add(std::string("cycles.") + mac::mode_name(m), (double)cycles,
                       "cycles", Provenance::Modeled);
        if (m == mac::MacMode::Bf16x1) cycles_bf16 = cycles;
        else
            res.report.add(std::string("speedup.") + mac::mode_name(m),
                           (double)cycles_bf16 / (double)cycles, "ratio",
                           Provenance::Modeled);
    }

    // emulate one gemm end to end for ops/energy accounting
    util::Rng rng(rc.seed);
    auto mode = mac::mode_from_name(spec.mode);
    ScalarFormat lf = mac::lane_format(mode);
    numerics::TensorMap offchip;
    offchip["a"] = seeded_code_tensor(rng, (uint32_t)spec.m, (uint32_t)spec.k, lf);
    offchip["b"] = seeded_code_tensor(rng, (uint32_t)spec.k, (uint32_t)spec.n, lf);
    core::Program p = core::parse_program(
        "LOAD tensor=a buf=input\n"
        "LOAD tensor=b buf=weight\n"
        "MATMUL a=a b=b dst=c mode=" + std::string(mac::mode_name(mode)) +
        " out=bf16 buf=output\n"
        "STORE tensor=c buf=output\n");
    core::ExecConfig ec = rc.exec;
    ec.buffers[0].capacity = ec.buffers[1].capacity = ec.buffers[2].capacity =
        ec.buffers[3].capacity = 64ull << 20;
    auto r = core::execute(p, offchip, ec);
    auto sum = core::report(r.counters, ec.clock_mhz, 0.0);
    res.report.add("emulated.total_cycles", (double)r.counters.total_cycles, "cycles",
                   Provenance::Modeled);
    res.report.add("emulated.mac_ops", (double)r.counters.mac_ops, "count",
                   Provenance::Measured);
    res.report.add("emulated.gops", sum.gops, "gops", Provenance::Modeled);
    res.report.add("emulated.energy", r.counters.energy_pj, "pJ", Provenance::Modeled);

    // lane-claim windows hold on this k-dominated shape at the 8x8 geometry
    if (spec.m == 64 && spec.k == 600 && spec.n == 64 && g.rows == 8 && g.cols == 8) {
        double r_fp8 = res.report.find("speedup.fp8x3")->value;
        double r_int4 = res.report.find("speedup.int4x6")->value;
        res.thresholds_ok &=
            check_row(res.report, "speedup.fp8x3", r_fp8 >= 2.7 && r_fp8 <= 3.3);
        res.thresholds_ok &=
            check_row(res.report, "speedup.int4x6", r_int4 >= 5.4 && r_int4 <= 6.6);
    }
}

void perf_transformer(const PerfSpec& spec, const RunConfig& rc, CommandResult& res) {
    util::Rng rng(rc.seed);
    auto mode = mac::mode_from_name(spec.mode);
    ScalarFormat lf = mac::lane_format(mode);
    const uint32_t d = 64, dff = 128, heads = 4, dh = d / heads, seq = spec.seq;
    std::string prec = lf == ScalarFormat::Bf16 ? "bf16" : "fp8";

    numerics::TensorMap offchip;
    offchip["x"] = seeded_code_tensor(rng, seq, d, lf);
    std::vector<core::LayerDesc> layers;
    core::ExecConfig ec = rc.exec;
    ec.preload = {{"x", "input"}};
    for (uint32_t l = 0; l < spec.layers; ++l) {
        std::string n = "l" + std::to_string(l);
        for (const char* w : {"wq", "wk", "wv", "wo"})
            offchip[n + "." + w] = seeded_code_tensor(rng, d, d, lf);
        offchip[n + ".w1"] = seeded_code_tensor(rng, d, dff, lf);
        offchip[n + ".w2"] = seeded_code_tensor(rng, dff, d, lf);
        offchip[n + ".o"] = seeded_code_tensor(rng, seq, d, lf);
        ec.preload.push_back({n + ".o", "scratchpad"});
        for (uint32_t h = 0; h < heads; ++h) {
            std::string hs = ".h" + std::to_string(h);
            offchip[n + ".q" + hs] = seeded_code_tensor(rng, seq, dh, lf);
            offchip[n + ".kT" + hs] = seeded_code_tensor(rng, dh, seq, lf);
            offchip[n + ".v" + hs] = seeded_code_tensor(rng, seq, dh, lf);
            for (const char* t : {".q", ".kT", ".v"})
                ec.preload.push_back({n + t + hs, "scratchpad"});
        }

        core::LayerDesc att;
        att.kind = core::LayerDesc::Kind::Attention;
        att.seq = seq;
        att.d_model = d;
        att.n_heads = heads;
        att.mode = spec.mode;
        att.naf_prec = prec;
        att.name = n;
        layers.push_back(att);
        core::LayerDesc ffn = att;
        ffn.kind = core::LayerDesc::Kind::Ffn;
        ffn.d_ffn = dff;
        layers.push_back(ffn);
    }
    core::Program p = core::build_layer_program(layers);
    auto r = core::execute(p, offchip, ec);
    auto sum = core::report(r.counters, ec.clock_mhz, (double)seq);

    const auto& c = r.counters;
    res.report.add("total_cycles", (double)c.total_cycles, "cycles", Provenance::Modeled);
    res.report.add("mru_busy", (double)c.mru_busy, "cycles", Provenance::Modeled);
    res.report.add("mme_busy", (double)c.mme_busy, "cycles", Provenance::Modeled);
    res.report.add("nmv_busy", (double)c.nmv_busy, "cycles", Provenance::Modeled);
    res.report.add("mwu_busy", (double)c.mwu_busy, "cycles", Provenance::Modeled);
    res.report.add("bytes_moved", (double)c.bytes_moved, "bytes", Provenance::Measured);
    res.report.add("mac_ops", (double)c.mac_ops, "count", Provenance::Measured);
    res.report.add("naf_ops", (double)c.naf_ops, "count", Provenance::Measured);
    // reported against the published up-to-60% share claim, not asserted
    res.report.add("naf_share", (double)c.naf_ops / (double)(c.naf_ops + c.mac_ops),
                   "ratio", Provenance::Measured);
    res.report.add("tokens_per_s", sum.tokens_per_s, "tokens/s", Provenance::Modeled);
    res.report.add("gops", sum.gops, "gops", Provenance::Modeled);
    res.report.add("energy", c.energy_pj, "pJ", Provenance::Modeled);
    res.report.add("pj_per_op", sum.pj_per_op, "pJ/op", Provenance::Modeled);
}

} // namespace

CommandResult cmd_perf(const PerfSpec& spec, const RunConfig& rc) {
    CommandResult res;
    res.report = new_report("perf");
    if (spec.workload == "gemm") {
        perf_gemm(spec, rc, res);
    } else if (spec.workload == "transformer") {
        perf_transformer(spec, rc, res);
    } else if (spec.workload == "none") {
        // zero workload: empty metric set, success
    } else {
        throw std::invalid_argument("unknown workload: " + spec.workload);
    }
    return res;
}

// --- size-report ---------------------------------------------------------------

CommandResult cmd_size_report(double params, uint32_t block_size, const RunConfig& rc) {
    (void)rc;
    if (params < 1) throw std::invalid_argument("size-report: params >= 1");
    CommandResult res;
    res.report = new_report("size-report");

    const double fp32_bytes = params * 4.0;
    struct Row {
        const char* label;
        ScalarFormat f;
    };
    const Row rows[] = {{"fp32", ScalarFormat::Ref},   {"bf16", ScalarFormat::Bf16},
                        {"int8", ScalarFormat::Int8},  {"fp8", ScalarFormat::Fp8},
                        {"int4", ScalarFormat::Int4},  {"fp4", ScalarFormat::Fp4}};
    model::ModelConfig toy;
    for (const auto& row : rows) {
        double bytes = model::analytic_size_bytes(params, row.f, block_size);
        bool calibrated = row.f != ScalarFormat::Ref && row.f != ScalarFormat::Bf16;
        auto prov = calibrated ? Provenance::Calibrated : Provenance::Modeled;
        res.report.add(std::string("bytes.") + row.label, bytes, "bytes", prov);
        res.report.add(std::string("ratio.") + row.label, fp32_bytes / bytes, "ratio", prov);
        auto toy_rep = model::model_size_report(toy, row.f, block_size);
        res.report.add(std::string("toy.bytes.") + row.label, (double)toy_rep.toy_bytes,
                       "bytes", prov);
        res.report.add(std::string("toy.ratio.") + row.label, toy_rep.toy_ratio_vs_fp32,
                       "ratio", prov);
    }
    res.report.add("retained_bf16_fraction", model::kRetainedBf16Fraction, "fraction",
                   Provenance::Calibrated);

    if (params == model::kFullScaleParams) {
        double fp4_ratio = res.report.find("ratio.fp4")->value;
        double fp4_bytes = res.report.find("bytes.fp4")->value;
        res.thresholds_ok &=
            check_row(res.report, "ratio.fp4", fp4_ratio >= 3.9 && fp4_ratio <= 4.3);
        res.thresholds_ok &= check_row(res.report, "bytes.fp4",
                                       std::fabs(fp4_bytes - 0.56e9) <= 0.056e9);
        res.thresholds_ok &=
            check_row(res.report, "ratio.bf16", res.report.find("ratio.bf16")->value == 2.0);
        res.thresholds_ok &=
            check_row(res.report, "ratio.fp32", res.report.find("ratio.fp32")->value == 1.0);
    }
    return res;
}

// --- translate-toy ---------------------------------------------------------------

CommandResult cmd_translate_toy(const std::vector<int>& src_tokens,
                                const std::string& precision, uint32_t max_len,
                                uint32_t batch, const RunConfig& rc) {
    if (src_tokens.empty()) throw std::invalid_argument("translate-toy: empty input");
    CommandResult res;
    res.report = new_report("translate-toy");

    model::ModelConfig cfg;
    cfg.seed = rc.seed;
    auto prec = model::precision_from_name(precision);
    auto w = model::init_weights(cfg);
    model::ModelWeights qw;
    const model::ModelWeights* run_w = &w;
    if (prec != model::Precision::Ref) {
        qw = model::ptq_model(w, model::format_of(prec), cfg.block_size);
        run_w = &qw;
    }
    for (int id : src_tokens)
        if (id < 0 || (uint32_t)id >= cfg.vocab_size)
            throw std::invalid_argument("translate-toy: token id out of range");

    auto agreement = [](const std::vector<int>& a, const std::vector<int>& b) {
        size_t n = std::max(a.size(), b.size());
        if (n == 0) return 1.0;
        size_t match = 0;
        for (size_t i = 0; i < std::min(a.size(), b.size()); ++i)
            if (a[i] == b[i]) ++match;
        return (double)match / (double)n;
    };

    auto ref_out = model::greedy_decode(src_tokens, w, model::Precision::Ref, max_len);
    auto out = prec == model::Precision::Ref
                   ? ref_out
                   : model::greedy_decode(src_tokens, *run_w, prec, max_len);
    double agr = agreement(ref_out, out);
    res.report.add("out_len", (double)out.size(), "tokens", Provenance::Measured);
    res.report.add("agreement", agr, "fraction", Provenance::Measured);

    std::ostringstream text;
    text << "tokens:";
    for (int t : out) text << ' ' << t;
    text << '\n';
    res.text_output = text.str();

    if (batch > 0) {
        util::Rng rng(rc.seed + 1);
        double total = 0.0;
        for (uint32_t i = 0; i < batch; ++i) {
            size_t len = (size_t)rng.uniform_int(3, 8);
            std::vector<int> src(len);
            for (auto& id : src) id = (int)rng.uniform_int(4, cfg.vocab_size - 1);
            auto r0 = model::greedy_decode(src, w, model::Precision::Ref, max_len);
            auto r1 = prec == model::Precision::Ref
                          ? r0
                          : model::greedy_decode(src, *run_w, prec, max_len);
            total += agreement(r0, r1);
        }
        res.report.add("batch.sequences", (double)batch, "count", Provenance::Measured);
        res.report.add("batch.agreement", total / batch, "fraction", Provenance::Measured);
    }

    if (prec == model::Precision::Ref)
        res.thresholds_ok &= check_row(res.report, "agreement", agr == 1.0);
    return res;
}

std::string emit_report(const CommandResult& r, const RunConfig& rc) {
    std::string text;
    if (rc.format == "csv")
        text = r.csv_override.empty() ? util::to_csv(r.report) : r.csv_override;
    else
        text = util::to_json(r.report);
    if (!rc.out_path.empty()) util::write_file_atomic(rc.out_path, text);
    return text;
}

} // namespace nlpe::cli

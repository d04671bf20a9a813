#include "nlpe/core/executor.hpp"

#include <map>
#include <set>
#include <stdexcept>

#include <json.hpp>

#include "nlpe/naf/naf.hpp"

namespace nlpe::core {

namespace {

using numerics::ScalarFormat;
using numerics::Tensor;

uint64_t stored_bytes(const Tensor& t) {
    return numerics::tensor_size_bytes(t.dims(), t.format(),
                                       t.params() ? t.params()->block_size : 0);
}

struct Machine {
    const ExecConfig& cfg;
    std::map<std::string, Tensor> workspace;        // on-chip values by name
    std::map<std::string, std::string> location;    // tensor -> buffer id
    std::map<std::string, const BufferSpec*> specs;

    explicit Machine(const ExecConfig& c) : cfg(c) {
        for (const auto& b : c.buffers) specs[b.id] = &b;
    }

    void bind(const std::string& tensor, const Tensor& value, const std::string& buf) {
        auto it = specs.find(buf);
        if (it == specs.end()) throw std::invalid_argument("unknown buffer: " + buf);
        if (stored_bytes(value) > it->second->capacity)
            throw std::runtime_error("buffer capacity exceeded: " + tensor + " in " + buf);
        workspace[tensor] = value;
        location[tensor] = buf;
    }

    const Tensor& resident(const std::string& name) const {
        auto it = workspace.find(name);
        if (it == workspace.end())
            throw std::runtime_error("unresolved operand: " + name);
        return it->second;
    }
};

struct Step {
    uint64_t cycles = 0;
    bool transfer = false;
    bool sync = false;
    std::set<std::string> bufs;
};

uint64_t transfer_cycles(const MemoryModel& m, uint64_t bytes) {
    return m.offchip_latency + (bytes + m.bandwidth - 1) / m.bandwidth;
}

} // namespace

ExecConfig config_from_kv(const util::KvMap& kv) {
    ExecConfig c;
    c.clock_mhz = util::kv_get(kv, "clock_mhz", c.clock_mhz);
    c.mem.offchip_latency =
        (uint64_t)util::kv_get(kv, "offchip_latency", (long long)c.mem.offchip_latency);
    c.mem.bandwidth = (uint64_t)util::kv_get(kv, "bandwidth", (long long)c.mem.bandwidth);
    c.geometry.rows = (uint32_t)util::kv_get(kv, "rows", (long long)c.geometry.rows);
    c.geometry.cols = (uint32_t)util::kv_get(kv, "cols", (long long)c.geometry.cols);
    c.mac_pj = util::kv_get(kv, "mac_pj", c.mac_pj);
    c.naf_pj = util::kv_get(kv, "naf_pj", c.naf_pj);
    c.naf_iterations = (int)util::kv_get(kv, "naf_iterations", (long long)c.naf_iterations);
    c.overlap = util::kv_get(kv, "overlap", (long long)(c.overlap ? 1 : 0)) != 0;
    return c;
}

ExecResult execute(const Program& program, const numerics::TensorMap& offchip,
                   const ExecConfig& cfg) {
    Machine m(cfg);
    for (const auto& [tensor, buf] : cfg.preload) {
        auto it = offchip.find(tensor);
        if (it == offchip.end()) throw std::runtime_error("preload tensor missing: " + tensor);
        m.bind(tensor, it->second, buf);
    }

    ExecResult res;
    std::vector<Step> steps;
    steps.reserve(program.size());

    for (const auto& ins : program) {
        Step st;
        switch (ins.op) {
            case Opcode::Load: {
                const std::string& name = ins.arg("tensor");
                auto it = offchip.find(name);
                if (it == offchip.end())
                    throw std::runtime_error("unresolved operand: " + name);
                const std::string& buf = ins.arg("buf");
                m.bind(name, it->second, buf);
                uint64_t bytes = stored_bytes(it->second);
                st.cycles = transfer_cycles(cfg.mem, bytes);
                st.transfer = true;
                st.bufs = {buf};
                res.counters.mru_busy += st.cycles;
                res.counters.bytes_moved += bytes;
                break;
            }
            case Opcode::Store: {
                const std::string& name = ins.arg("tensor");
                const Tensor& t = m.resident(name);
                res.outputs[name] = t;
                uint64_t bytes = stored_bytes(t);
                st.cycles = transfer_cycles(cfg.mem, bytes);
                st.transfer = true;
                st.bufs = {m.location.at(name)};
                res.counters.mwu_busy += st.cycles;
                res.counters.bytes_moved += bytes;
                break;
            }
            case Opcode::Matmul: {
                const Tensor& a = m.resident(ins.arg("a"));
                const Tensor& b = m.resident(ins.arg("b"));
                auto mode = mac::mode_from_name(ins.arg_or("mode", "bf16x1"));
                auto out = numerics::format_from_name(ins.arg_or("out", "bf16"));
                auto r = mme::matmul(a, b, mode, out, cfg.geometry);
                const std::string& buf = ins.arg_or("buf", "scratchpad");
                m.bind(ins.arg("dst"), r.c, buf);
                st.cycles = r.stats.cycles;
                st.bufs = {m.location.at(ins.arg("a")), m.location.at(ins.arg("b")), buf};
                res.counters.mme_busy += st.cycles;
                res.counters.mac_ops += r.stats.mac_ops;
                break;
            }
            case Opcode::Naf: {
                const std::string& name = ins.arg("tensor");
                Tensor t = m.resident(name);
                auto kind = naf::naf_from_name(ins.arg("kind"));
                auto prec = numerics::format_from_name(ins.arg_or("prec", "bf16"));
                naf::CordicConfig nc{cfg.naf_iterations, prec};
                uint64_t n = t.numel();
                Tensor y = Tensor::zeros(t.dims(), prec);
                if (kind == naf::NafKind::SoftMax) {
                    uint64_t cols = t.dims().back();
                    uint64_t rows = n / cols;
                    std::vector<double> row(cols);
                    for (uint64_t r = 0; r < rows; ++r) {
                        for (uint64_t c = 0; c < cols; ++c)
                            row[c] = t.value_at(r * cols + c);
                        auto sm = naf::softmax(row, nc);
                        for (uint64_t c = 0; c < cols; ++c)
                            y.set_code(r * cols + c,
                                       numerics::encode_bits(sm[c], prec));
                    }
                } else {
                    for (uint64_t i = 0; i < n; ++i)
                        y.set_code(i, numerics::encode_bits(
                                          naf::naf_eval(t.value_at(i), kind, nc), prec));
                }
                m.bind(name, y, m.location.at(name));
                st.cycles = naf::naf_vector_cycles(n, prec, cfg.naf_iterations);
                st.bufs = {m.location.at(name)};
                res.counters.nmv_busy += st.cycles;
                res.counters.naf_ops += n;
                break;
            }
            case Opcode::Sync:
                st.sync = true;
                break;
        }
        steps.push_back(std::move(st));
    }

    // timing walk: pair one transfer with one adjacent compute on disjoint buffers
    uint64_t total = 0;
    for (size_t i = 0; i < steps.size();) {
        bool paired = false;
        if (cfg.overlap && i + 1 < steps.size()) {
            const Step& x = steps[i];
            const Step& y = steps[i + 1];
            if (!x.sync && !y.sync && x.transfer != y.transfer) {
                bool disjoint = true;
                for (const auto& b : x.bufs)
                    if (y.bufs.count(b)) disjoint = false;
                if (disjoint) {
                    total += std::max(x.cycles, y.cycles);
                    i += 2;
                    paired = true;
                }
            }
        }
        if (!paired) {
            total += steps[i].cycles;
            ++i;
        }
    }
    res.counters.total_cycles = total;
    res.counters.energy_pj = (double)res.counters.mac_ops * cfg.mac_pj +
                             (double)res.counters.naf_ops * cfg.naf_pj;
    return res;
}

std::string counters_record(const PerfCounters& c) {
    nlohmann::ordered_json j;
    j["total_cycles"] = c.total_cycles;
    j["mru_busy"] = c.mru_busy;
    j["mme_busy"] = c.mme_busy;
    j["nmv_busy"] = c.nmv_busy;
    j["mwu_busy"] = c.mwu_busy;
    j["bytes_moved"] = c.bytes_moved;
    j["mac_ops"] = c.mac_ops;
    j["naf_ops"] = c.naf_ops;
    j["energy_pj"] = c.energy_pj;
    return j.dump();
}

PerfSummary report(const PerfCounters& c, double clock_mhz, double tokens) {
    PerfSummary s;
    uint64_t ops = c.mac_ops + c.naf_ops;
    s.energy_pj = c.energy_pj;
    if (c.total_cycles == 0) {
        if (ops != 0) throw std::invalid_argument("report: zero cycles with nonzero work");
        return s;
    }
    double hz = clock_mhz * 1e6;
    if (tokens > 0) {
        double cycles_per_token = (double)c.total_cycles / tokens;
        s.tokens_per_s = hz / cycles_per_token;
    }
    s.gops = (double)ops * hz / (double)c.total_cycles / 1e9;
    s.pj_per_op = ops ? c.energy_pj / (double)ops : 0.0;
    return s;
}

} // namespace nlpe::core

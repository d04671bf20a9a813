#include "nlpe/model/transformer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "nlpe/util/rng.hpp"

namespace nlpe::model {

namespace {

using numerics::ScalarFormat;
using numerics::Tensor;

constexpr double kLnEps = 1e-5;
const mme::ArrayGeometry kGeom{8, 8}; // functional results are geometry-invariant

ScalarFormat naf_io_of(Precision p) {
    return p == Precision::Bf16 ? ScalarFormat::Bf16 : ScalarFormat::Fp8;
}

naf::CordicConfig naf_cfg_of(Precision p) { return naf::CordicConfig{16, naf_io_of(p)}; }

Tensor mat_to_ref(const Mat& m) {
    return Tensor::from_ref({m.rows, m.cols}, m.v);
}

double q_io(double v, ScalarFormat f) {
    return numerics::decode_bits(numerics::encode_bits(v, f), f);
}

// ---------------------------------------------------------------------------
// linear: y = x . W^T with W stored (out_features, in_features)
// ---------------------------------------------------------------------------

Mat linear_ref(const Mat& x, const Tensor& w) {
    uint32_t n = w.dims()[0], k = w.dims()[1];
    Mat y(x.rows, n);
    for (uint32_t m = 0; m < x.rows; ++m)
        for (uint32_t j = 0; j < n; ++j) {
            double acc = 0.0;
            for (uint32_t kk = 0; kk < k; ++kk)
                acc += x.at(m, kk) * w.value_at((uint64_t)j * k + kk);
            y.at(m, j) = acc;
        }
    return y;
}

// codes of q copied into a params-free tensor so the engine streams raw
// format values; block scales are applied around the engine call
Tensor strip_scales(const Tensor& q) {
    Tensor t = Tensor::zeros(q.dims(), q.format());
    t.payload() = q.payload();
    return t;
}

Mat linear_mme(const Mat& x, const Tensor& w, Precision p) {
    const uint32_t n = w.dims()[0], k = w.dims()[1];
    const ScalarFormat f = format_of(p);
    const mac::MacMode mode = mode_of(p);
    Mat y(x.rows, n);

    if (f == ScalarFormat::Bf16) { // scale 1, single pass over the full depth
        Tensor a = Tensor::zeros({x.rows, k}, f);
        for (uint64_t i = 0; i < a.numel(); ++i)
            a.set_code(i, numerics::encode_bits(x.v[i], f));
        Tensor b = Tensor::zeros({k, n}, f);
        for (uint32_t kk = 0; kk < k; ++kk)
            for (uint32_t j = 0; j < n; ++j)
                b.set_code((uint64_t)kk * n + j, w.code_at((uint64_t)j * k + kk));
        auto r = mme::matmul(a, b, mode, ScalarFormat::Bf16, kGeom);
        for (uint64_t i = 0; i < y.v.size(); ++i)
            y.v[i] = numerics::decode_bits(r.c.code_at(i), ScalarFormat::Bf16);
        return y;
    }

    const uint32_t bs = w.params() ? std::min<uint32_t>(w.params()->block_size, k) : k;
    if (k % bs != 0)
        throw std::logic_error("linear: weight blocks not aligned to the depth");
    // every streamed k-slice of a weight row must sit inside one scale block
    if (w.params() && w.params()->block_size > bs) {
        uint32_t sb = w.params()->block_size;
        for (uint32_t j = 0; j < n; ++j)
            for (uint32_t k0 = 0; k0 < k; k0 += bs)
                if (((uint64_t)j * k + k0) / sb != ((uint64_t)j * k + k0 + bs - 1) / sb)
                    throw std::logic_error("linear: scale block straddles a k-slice");
    }

    for (uint32_t k0 = 0; k0 < k; k0 += bs) {
        // dynamic per-row quantization of the activation slice
        Tensor slice = Tensor::zeros({x.rows, bs}, ScalarFormat::Ref);
        for (uint32_t m = 0; m < x.rows; ++m)
            for (uint32_t kk = 0; kk < bs; ++kk)
                slice.ref_data()[(uint64_t)m * bs + kk] = x.at(m, k0 + kk);
        Tensor aq = numerics::quantize_tensor(slice, f, bs);
        const auto& sx = aq.params()->scales;

        Tensor b = Tensor::zeros({bs, n}, f);
        for (uint32_t kk = 0; kk < bs; ++kk)
            for (uint32_t j = 0; j < n; ++j)
                b.set_code((uint64_t)kk * n + j, w.code_at((uint64_t)j * k + k0 + kk));

        auto r = mme::matmul(strip_scales(aq), b, mode, ScalarFormat::Bf16, kGeom);
        for (uint32_t m = 0; m < x.rows; ++m)
            for (uint32_t j = 0; j < n; ++j) {
                double sw = w.scale_for((uint64_t)j * k + k0);
                y.at(m, j) += sx[m] * sw *
                              numerics::decode_bits(r.c.code_at((uint64_t)m * n + j),
                                                    ScalarFormat::Bf16);
            }
    }
    return y;
}

Mat linear(const Mat& x, const Tensor& w, Precision p) {
    if (w.dims().size() != 2 || x.cols != w.dims()[1])
        throw std::invalid_argument("linear: shape mismatch");
    // tensors held at a different precision than the engine lanes (norm
    // gains, gates in sub-octet modes) run on the vector unit at full width
    if (p == Precision::Ref || w.format() == ScalarFormat::Ref ||
        w.format() != format_of(p))
        return linear_ref(x, w);
    return linear_mme(x, w, p);
}

// one weight matrix of an activation-derived operand (per-row scales)
Tensor dyn_weight(const Mat& w, Precision p) {
    if (p == Precision::Ref) return mat_to_ref(w);
    return numerics::quantize_tensor(mat_to_ref(w), format_of(p), w.cols);
}

// ---------------------------------------------------------------------------
// elementwise pieces
// ---------------------------------------------------------------------------

Mat layer_norm(const Mat& x, const Tensor& g, const Tensor& b) {
    Mat y(x.rows, x.cols);
    for (uint32_t r = 0; r < x.rows; ++r) {
        double mean = 0.0;
        for (uint32_t c = 0; c < x.cols; ++c) mean += x.at(r, c);
        mean /= x.cols;
        double var = 0.0;
        for (uint32_t c = 0; c < x.cols; ++c) {
            double d = x.at(r, c) - mean;
            var += d * d;
        }
        var /= x.cols;
        double inv = 1.0 / std::sqrt(var + kLnEps);
        for (uint32_t c = 0; c < x.cols; ++c)
            y.at(r, c) = g.value_at(c) * (x.at(r, c) - mean) * inv + b.value_at(c);
    }
    return y;
}

void softmax_rows(Mat& s, Precision p) {
    if (p == Precision::Ref) {
        for (uint32_t r = 0; r < s.rows; ++r) {
            double mx = s.at(r, 0);
            for (uint32_t c = 1; c < s.cols; ++c) mx = std::max(mx, s.at(r, c));
            double sum = 0.0;
            for (uint32_t c = 0; c < s.cols; ++c) {
                s.at(r, c) = std::exp(s.at(r, c) - mx);
                sum += s.at(r, c);
            }
            for (uint32_t c = 0; c < s.cols; ++c) s.at(r, c) /= sum;
        }
        return;
    }
    auto cfg = naf_cfg_of(p);
    std::vector<double> row(s.cols);
    for (uint32_t r = 0; r < s.rows; ++r) {
        for (uint32_t c = 0; c < s.cols; ++c) row[c] = q_io(s.at(r, c), cfg.io);
        auto sm = naf::softmax(row, cfg);
        for (uint32_t c = 0; c < s.cols; ++c) s.at(r, c) = q_io(sm[c], cfg.io);
    }
}

void gelu_inplace(Mat& x, Precision p) {
    if (p == Precision::Ref) {
        for (auto& v : x.v) v = naf::naf_reference(v, naf::NafKind::GeLU);
        return;
    }
    auto cfg = naf_cfg_of(p);
    for (auto& v : x.v)
        v = q_io(naf::naf_eval(q_io(v, cfg.io), naf::NafKind::GeLU, cfg), cfg.io);
}

// ---------------------------------------------------------------------------
// weight table
// ---------------------------------------------------------------------------

struct ShapeEntry {
    std::string name;
    std::vector<uint32_t> dims;
    enum class Init { Normal, One, Zero, Positional } init = Init::Normal;
};

std::vector<ShapeEntry> weight_shapes(const ModelConfig& cfg) {
    using Init = ShapeEntry::Init;
    std::vector<ShapeEntry> out;
    auto norm = [&](const std::string& p) {
        out.push_back({p + ".g", {cfg.d_model}, Init::One});
        out.push_back({p + ".b", {cfg.d_model}, Init::Zero});
    };
    auto attn = [&](const std::string& p) {
        norm(p + ".ln");
        for (const char* w : {"wq", "wk", "wv", "wo"})
            out.push_back({p + "." + w, {cfg.d_model, cfg.d_model}, Init::Normal});
    };
    auto ffn = [&](const std::string& p, bool moe) {
        norm(p + ".ln");
        if (moe) {
            out.push_back({p + ".gate", {cfg.n_experts, cfg.d_model}, Init::Normal});
            for (uint32_t e = 0; e < cfg.n_experts; ++e) {
                std::string ep = p + ".e" + std::to_string(e);
                out.push_back({ep + ".w1", {cfg.d_ffn, cfg.d_model}, Init::Normal});
                out.push_back({ep + ".w2", {cfg.d_model, cfg.d_ffn}, Init::Normal});
            }
        } else {
            out.push_back({p + ".w1", {cfg.d_ffn, cfg.d_model}, Init::Normal});
            out.push_back({p + ".w2", {cfg.d_model, cfg.d_ffn}, Init::Normal});
        }
    };

    out.push_back({"emb", {cfg.vocab_size, cfg.d_model}, Init::Normal});
    out.push_back({"pos", {cfg.max_seq, cfg.d_model}, Init::Positional});
    for (uint32_t l = 0; l < cfg.n_layers_enc; ++l) {
        std::string p = "enc.l" + std::to_string(l);
        attn(p + ".self");
        ffn(p + ".ffn", cfg.layer_is_moe(l));
    }
    norm("enc.norm");
    for (uint32_t l = 0; l < cfg.n_layers_dec; ++l) {
        std::string p = "dec.l" + std::to_string(l);
        attn(p + ".self");
        attn(p + ".x");
        ffn(p + ".ffn", cfg.layer_is_moe(l));
    }
    norm("dec.norm");
    out.push_back({"out.w", {cfg.vocab_size, cfg.d_model}, Init::Normal});
    return out;
}

bool kept_bf16(const std::string& name) {
    auto ends_with = [&](const char* s) {
        size_t n = std::string(s).size();
        return name.size() >= n && name.compare(name.size() - n, n, s) == 0;
    };
    return name == "pos" || ends_with(".g") || ends_with(".b") || ends_with(".gate");
}

Mat embed(const std::vector<int>& tokens, const ModelWeights& w) {
    const Tensor& emb = w.tensors.at("emb");
    const Tensor& pos = w.tensors.at("pos");
    uint32_t d = w.cfg.d_model;
    if (tokens.size() > w.cfg.max_seq)
        throw std::invalid_argument("sequence longer than the positional table");
    Mat x((uint32_t)tokens.size(), d);
    for (uint32_t t = 0; t < tokens.size(); ++t) {
        int id = tokens[t];
        if (id < 0 || (uint32_t)id >= w.cfg.vocab_size)
            throw std::invalid_argument("token id out of range");
        for (uint32_t c = 0; c < d; ++c)
            x.at(t, c) = emb.value_at((uint64_t)id * d + c) +
                         pos.value_at((uint64_t)t * d + c);
    }
    return x;
}

Mat ffn_core(const Mat& xn, const ModelWeights& w, const std::string& prefix,
             Precision p) {
    Mat h = linear(xn, w.tensors.at(prefix + ".w1"), p);
    gelu_inplace(h, p);
    return linear(h, w.tensors.at(prefix + ".w2"), p);
}

Mat add(const Mat& a, const Mat& b) {
    Mat y(a.rows, a.cols);
    for (size_t i = 0; i < y.v.size(); ++i) y.v[i] = a.v[i] + b.v[i];
    return y;
}

Mat ffn_block(const Mat& x, const ModelWeights& w, const std::string& prefix,
              Precision p, bool moe) {
    Mat xn = layer_norm(x, w.tensors.at(prefix + ".ln.g"), w.tensors.at(prefix + ".ln.b"));
    if (!moe) return add(x, ffn_core(xn, w, prefix, p));
    auto [mix, gate] = moe_ffn(xn, w, prefix, p);
    (void)gate;
    return add(x, mix);
}

} // namespace

// ---------------------------------------------------------------------------

void ModelConfig::validate() const {
    if (d_model == 0 || n_heads == 0 || d_model % n_heads != 0)
        throw std::invalid_argument("d_model must be divisible by n_heads");
    if (top_k < 1 || top_k > n_experts)
        throw std::invalid_argument("top_k must be in [1, n_experts]");
    if (vocab_size < 4) throw std::invalid_argument("vocab needs pad/bos/eos/unk");
}

bool ModelConfig::layer_is_moe(uint32_t layer) const {
    return moe_every_other && (layer % 2 == 1);
}

const char* precision_name(Precision p) {
    switch (p) {
        case Precision::Ref: return "ref";
        case Precision::Int4: return "int4";
        case Precision::Fp4: return "fp4";
        case Precision::Fp8: return "fp8";
        case Precision::Bf16: return "bf16";
    }
    return "?";
}

Precision precision_from_name(const std::string& name) {
    for (auto p : {Precision::Ref, Precision::Int4, Precision::Fp4, Precision::Fp8,
                   Precision::Bf16})
        if (name == precision_name(p)) return p;
    throw std::invalid_argument("unknown precision: " + name);
}

ScalarFormat format_of(Precision p) {
    switch (p) {
        case Precision::Int4: return ScalarFormat::Int4;
        case Precision::Fp4: return ScalarFormat::Fp4;
        case Precision::Fp8: return ScalarFormat::Fp8;
        case Precision::Bf16: return ScalarFormat::Bf16;
        default: throw std::invalid_argument("ref has no lane format");
    }
}

mac::MacMode mode_of(Precision p) {
    switch (p) {
        case Precision::Int4: return mac::MacMode::Int4x6;
        case Precision::Fp4: return mac::MacMode::Fp4x6;
        case Precision::Fp8: return mac::MacMode::Fp8x3;
        case Precision::Bf16: return mac::MacMode::Bf16x1;
        default: throw std::invalid_argument("ref has no mac mode");
    }
}

numerics::Tensor positional_encoding(uint32_t seq_len, uint32_t d_model) {
    if (seq_len == 0 || d_model == 0)
        throw std::invalid_argument("positional_encoding: positive dims");
    Tensor t = Tensor::zeros({seq_len, d_model}, ScalarFormat::Ref);
    for (uint32_t p = 0; p < seq_len; ++p)
        for (uint32_t i = 0; i < d_model; ++i) {
            double angle = p / std::pow(10000.0, (double)(2 * (i / 2)) / d_model);
            t.ref_data()[(uint64_t)p * d_model + i] =
                (i % 2 == 0) ? std::sin(angle) : std::cos(angle);
        }
    return t;
}

ModelWeights init_weights(const ModelConfig& cfg) {
    cfg.validate();
    ModelWeights w;
    w.cfg = cfg;
    util::Rng rng(cfg.seed);
    double std = 1.0 / std::sqrt((double)cfg.d_model);
    for (const auto& e : weight_shapes(cfg)) {
        if (e.init == ShapeEntry::Init::Positional) {
            w.tensors[e.name] = positional_encoding(e.dims[0], e.dims[1]);
            continue;
        }
        Tensor t = Tensor::zeros(e.dims, ScalarFormat::Ref);
        for (auto& v : t.ref_data()) {
            switch (e.init) {
                case ShapeEntry::Init::Normal: v = rng.normal(0.0, std); break;
                case ShapeEntry::Init::One: v = 1.0; break;
                case ShapeEntry::Init::Zero: v = 0.0; break;
                default: break;
            }
        }
        w.tensors[e.name] = std::move(t);
    }
    return w;
}

Mat attention_block(const Mat& x, const ModelWeights& w, const std::string& prefix,
                    Precision p, bool causal, const Mat* context) {
    const ModelConfig& cfg = w.cfg;
    const uint32_t dh = cfg.d_model / cfg.n_heads;
    Mat xn = layer_norm(x, w.tensors.at(prefix + ".ln.g"), w.tensors.at(prefix + ".ln.b"));
    const Mat& kv_src = context ? *context : xn;

    Mat q = linear(xn, w.tensors.at(prefix + ".wq"), p);
    Mat k = linear(kv_src, w.tensors.at(prefix + ".wk"), p);
    Mat v = linear(kv_src, w.tensors.at(prefix + ".wv"), p);

    Mat o(x.rows, cfg.d_model);
    const double inv_sqrt_dh = 1.0 / std::sqrt((double)dh);
    for (uint32_t h = 0; h < cfg.n_heads; ++h) {
        Mat qh(x.rows, dh), kh(k.rows, dh), vht(dh, k.rows);
        for (uint32_t r = 0; r < x.rows; ++r)
            for (uint32_t c = 0; c < dh; ++c) qh.at(r, c) = q.at(r, h * dh + c);
        for (uint32_t r = 0; r < k.rows; ++r)
            for (uint32_t c = 0; c < dh; ++c) {
                kh.at(r, c) = k.at(r, h * dh + c);
                vht.at(c, r) = v.at(r, h * dh + c);
            }

        Mat s = linear(qh, dyn_weight(kh, p), p); // Q.K^T
        for (uint32_t i = 0; i < s.rows; ++i)
            for (uint32_t j = 0; j < s.cols; ++j) {
                s.at(i, j) *= inv_sqrt_dh;
                if (causal && j > i) s.at(i, j) = -1e30;
            }
        softmax_rows(s, p);
        Mat oh = linear(s, dyn_weight(vht, p), p); // P.V
        for (uint32_t r = 0; r < x.rows; ++r)
            for (uint32_t c = 0; c < dh; ++c) o.at(r, h * dh + c) = oh.at(r, c);
    }
    return add(x, linear(o, w.tensors.at(prefix + ".wo"), p));
}

std::pair<Mat, GateOutput> moe_ffn(const Mat& x, const ModelWeights& w,
                                   const std::string& prefix, Precision p) {
    const uint32_t E = w.cfg.n_experts;
    const uint32_t k = w.cfg.top_k;
    Mat logits = linear(x, w.tensors.at(prefix + ".gate"), p);
    softmax_rows(logits, p == Precision::Ref ? Precision::Ref : Precision::Bf16);

    GateOutput gate;
    gate.probs.resize(x.rows);
    gate.selected.resize(x.rows);
    gate.combine.resize(x.rows);

    std::vector<Mat> expert_out(E);
    std::vector<bool> needed(E, false);
    for (uint32_t t = 0; t < x.rows; ++t) {
        auto& probs = gate.probs[t];
        probs.assign(logits.v.begin() + (size_t)t * E, logits.v.begin() + (size_t)(t + 1) * E);
        std::vector<uint32_t> idx(E);
        std::iota(idx.begin(), idx.end(), 0u);
        std::sort(idx.begin(), idx.end(), [&](uint32_t a, uint32_t b) {
            if (probs[a] != probs[b]) return probs[a] > probs[b];
            return a < b; // ties to the lower expert id
        });
        idx.resize(k);
        double sum = 0.0;
        for (uint32_t e : idx) sum += probs[e];
        gate.selected[t] = idx;
        for (uint32_t e : idx) {
            gate.combine[t].push_back(sum > 0 ? probs[e] / sum : 1.0 / k);
            needed[e] = true;
        }
    }
    for (uint32_t e = 0; e < E; ++e)
        if (needed[e])
            expert_out[e] = ffn_core(x, w, prefix + ".e" + std::to_string(e), p);

    Mat y(x.rows, x.cols);
    for (uint32_t t = 0; t < x.rows; ++t)
        for (uint32_t s = 0; s < k; ++s) {
            const Mat& eo = expert_out[gate.selected[t][s]];
            double cw = gate.combine[t][s];
            for (uint32_t c = 0; c < x.cols; ++c) y.at(t, c) += cw * eo.at(t, c);
        }

    // Switch-style balance penalty: E * sum_e f_e * pbar_e
    std::vector<double> frac(E, 0.0), pbar(E, 0.0);
    for (uint32_t t = 0; t < x.rows; ++t) {
        frac[gate.selected[t][0]] += 1.0 / x.rows;
        for (uint32_t e = 0; e < E; ++e) pbar[e] += gate.probs[t][e] / x.rows;
    }
    gate.lb_loss = 0.0;
    for (uint32_t e = 0; e < E; ++e) gate.lb_loss += frac[e] * pbar[e];
    gate.lb_loss *= E;
    return {std::move(y), std::move(gate)};
}

Mat forward(const std::vector<int>& src_tokens, const std::vector<int>& tgt_prefix,
            const ModelWeights& w, Precision p) {
    const ModelConfig& cfg = w.cfg;
    if (src_tokens.empty() || tgt_prefix.empty())
        throw std::invalid_argument("forward: empty token sequence");

    Mat x = embed(src_tokens, w);
    for (uint32_t l = 0; l < cfg.n_layers_enc; ++l) {
        std::string lp = "enc.l" + std::to_string(l);
        x = attention_block(x, w, lp + ".self", p, /*causal=*/false);
        x = ffn_block(x, w, lp + ".ffn", p, cfg.layer_is_moe(l));
    }
    Mat enc_out = layer_norm(x, w.tensors.at("enc.norm.g"), w.tensors.at("enc.norm.b"));

    Mat y = embed(tgt_prefix, w);
    for (uint32_t l = 0; l < cfg.n_layers_dec; ++l) {
        std::string lp = "dec.l" + std::to_string(l);
        y = attention_block(y, w, lp + ".self", p, /*causal=*/true);
        y = attention_block(y, w, lp + ".x", p, /*causal=*/false, &enc_out);
        y = ffn_block(y, w, lp + ".ffn", p, cfg.layer_is_moe(l));
    }
    y = layer_norm(y, w.tensors.at("dec.norm.g"), w.tensors.at("dec.norm.b"));
    return linear(y, w.tensors.at("out.w"), p);
}

std::vector<int> greedy_decode(const std::vector<int>& src_tokens,
                               const ModelWeights& w, Precision p, uint32_t max_len) {
    if (max_len < 1) throw std::invalid_argument("greedy_decode: max_len >= 1");
    std::vector<int> prefix{kBos};
    std::vector<int> out;
    for (uint32_t step = 0; step < max_len; ++step) {
        Mat logits = forward(src_tokens, prefix, w, p);
        uint32_t last = logits.rows - 1;
        int best = 0;
        double best_v = logits.at(last, 0);
        for (uint32_t c = 1; c < logits.cols; ++c)
            if (logits.at(last, c) > best_v) { // ties keep the lowest id
                best_v = logits.at(last, c);
                best = (int)c;
            }
        out.push_back(best);
        prefix.push_back(best);
        if (best == kEos) break;
    }
    return out;
}

ModelWeights ptq_model(const ModelWeights& w, ScalarFormat f, uint32_t block_size) {
    if (f == ScalarFormat::Ref) throw std::invalid_argument("ptq target must be quantized");
    ModelWeights out;
    out.cfg = w.cfg;
    for (const auto& [name, t] : w.tensors) {
        if (t.format() != ScalarFormat::Ref)
            throw std::invalid_argument("ptq expects ref weights");
        ScalarFormat target = kept_bf16(name) ? ScalarFormat::Bf16 : f;
        uint32_t bs = std::min<uint64_t>(block_size, t.numel());
        out.tensors[name] = numerics::quantize_tensor(t, target, bs);
    }
    return out;
}

SizeReport model_size_report(const ModelConfig& cfg, ScalarFormat f, uint32_t block_size) {
    cfg.validate();
    SizeReport r;
    uint64_t fp32 = 0;
    for (const auto& e : weight_shapes(cfg)) {
        uint64_t n = numerics::numel_of(e.dims);
        fp32 += n * 4;
        if (f == ScalarFormat::Ref) {
            r.toy_bytes += numerics::tensor_size_bytes(e.dims, ScalarFormat::Ref, 0);
        } else if (kept_bf16(e.name) || f == ScalarFormat::Bf16) {
            r.toy_bytes += numerics::tensor_size_bytes(e.dims, ScalarFormat::Bf16, 0);
        } else {
            uint32_t bs = (uint32_t)std::min<uint64_t>(block_size, n);
            r.toy_bytes += numerics::tensor_size_bytes(e.dims, f, bs);
        }
    }
    r.toy_ratio_vs_fp32 = (double)fp32 / (double)r.toy_bytes;

    // full-scale configuration (600M parameters), analytic, never allocated
    r.full_scale_bytes = analytic_size_bytes(kFullScaleParams, f, block_size);
    if (f != ScalarFormat::Ref && f != ScalarFormat::Bf16)
        r.retained_bf16_fraction = kRetainedBf16Fraction;
    r.full_scale_ratio_vs_fp32 = kFullScaleParams * 4.0 / r.full_scale_bytes;
    return r;
}

double analytic_size_bytes(double params, ScalarFormat f, uint32_t block_size) {
    if (params < 1) throw std::invalid_argument("params >= 1");
    if (f == ScalarFormat::Ref) return params * 4.0;
    if (f == ScalarFormat::Bf16) return params * 2.0; // pure, no retained fraction
    const double rf = kRetainedBf16Fraction;
    const double bytes_per_code = numerics::bit_width(f) / 8.0 + 2.0 / block_size;
    return params * ((1.0 - rf) * bytes_per_code + rf * 2.0);
}

} // namespace nlpe::model

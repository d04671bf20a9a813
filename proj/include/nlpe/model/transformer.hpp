#pragma once
// Toy encoder-decoder with Pre-Norm residual blocks, multi-head attention,
// two-layer FFNs and an optional top-k gated mixture-of-experts FFN. Runs
// either in Ref precision (double everywhere, the oracle path) or quantized,
// where every matmul streams through the systolic engine and every
// nonlinearity through the CORDIC unit.

#include <cstdint>
#include <string>
#include <vector>

#include "nlpe/mme/systolic.hpp"
#include "nlpe/naf/naf.hpp"
#include "nlpe/numerics/tensor_io.hpp"

namespace nlpe::model {

enum class Precision { Ref, Int4, Fp4, Fp8, Bf16 };

const char* precision_name(Precision p);
Precision precision_from_name(const std::string& name);
numerics::ScalarFormat format_of(Precision p); // non-Ref only
mac::MacMode mode_of(Precision p);             // non-Ref only

// token id conventions
constexpr int kPad = 0;
constexpr int kBos = 1;
constexpr int kEos = 2;
constexpr int kUnk = 3;

struct ModelConfig {
    uint32_t n_layers_enc = 6;
    uint32_t n_layers_dec = 6;
    uint32_t d_model = 64;
    uint32_t n_heads = 4;
    uint32_t d_ffn = 128;
    uint32_t vocab_size = 1000;
    uint32_t n_experts = 4;
    uint32_t top_k = 2;
    uint64_t seed = 42;
    bool moe_every_other = true; // odd layers get the MoE ffn
    uint32_t max_seq = 64;
    uint32_t block_size = 64;    // quantization block

    void validate() const;
    bool layer_is_moe(uint32_t layer) const;
};

struct Mat {
    uint32_t rows = 0;
    uint32_t cols = 0;
    std::vector<double> v;

    Mat() = default;
    Mat(uint32_t r, uint32_t c) : rows(r), cols(c), v((size_t)r * c, 0.0) {}
    double& at(uint32_t r, uint32_t c) { return v[(size_t)r * cols + c]; }
    double at(uint32_t r, uint32_t c) const { return v[(size_t)r * cols + c]; }
};

struct GateOutput {
    std::vector<std::vector<double>> probs;      // per token
    std::vector<std::vector<uint32_t>> selected; // top_k ids, ties to lower id
    std::vector<std::vector<double>> combine;    // renormalized selected probs
    double lb_loss = 0.0;
};

struct ModelWeights {
    ModelConfig cfg;
    numerics::TensorMap tensors;
};

// Scaled-normal init (std 1/sqrt(d_model)), layer norms at identity,
// sinusoidal positional table. All tensors in Ref.
ModelWeights init_weights(const ModelConfig& cfg);

// PE[p,2i] = sin(p / 10000^(2i/d)), PE[p,2i+1] = cos(...) as a Ref tensor.
numerics::Tensor positional_encoding(uint32_t seq_len, uint32_t d_model);

// y = x + MHA(LayerNorm(x)); weights under <prefix>.{ln.g,ln.b,wq,wk,wv,wo}.
// context switches the block to cross-attention over the given memory.
Mat attention_block(const Mat& x, const ModelWeights& w, const std::string& prefix,
                    Precision p, bool causal, const Mat* context = nullptr);

// Mixture output (no residual): gate probs = softmax(x W_gate^T), top-k
// selection with ties to the lower expert id, outputs combined with the
// renormalized probabilities. lb_loss = E * sum_e f_e * pbar_e.
std::pair<Mat, GateOutput> moe_ffn(const Mat& x, const ModelWeights& w,
                                   const std::string& prefix, Precision p);

// Encoder stack then decoder stack (causal self-attention, cross-attention
// over the encoder output), projected to vocab logits per target position.
Mat forward(const std::vector<int>& src_tokens, const std::vector<int>& tgt_prefix,
            const ModelWeights& w, Precision p);

// Iterative argmax continuation from BOS until EOS or max_len. Returns the
// emitted tokens (EOS included when produced).
std::vector<int> greedy_decode(const std::vector<int>& src_tokens,
                               const ModelWeights& w, Precision p, uint32_t max_len);

// Quantize every matmul weight to the target format; layer norms, gates and
// the positional table stay bf16.
ModelWeights ptq_model(const ModelWeights& w, numerics::ScalarFormat f,
                       uint32_t block_size);

struct SizeReport {
    uint64_t toy_bytes = 0;
    double toy_ratio_vs_fp32 = 0.0;
    double full_scale_bytes = 0.0; // 600e6-parameter configuration, analytic
    double full_scale_ratio_vs_fp32 = 0.0;
    double retained_bf16_fraction = 0.0;
};

// Fitted to the published deployment footprint: this share of parameters
// (norms, gates, embedding scales and friends) stays at bf16 in the
// sub-octet profiles.
constexpr double kRetainedBf16Fraction = 0.274;
constexpr double kFullScaleParams = 600e6;

SizeReport model_size_report(const ModelConfig& cfg, numerics::ScalarFormat f,
                             uint32_t block_size);

// Deployment bytes for an arbitrary parameter count under the same
// mixed-precision profile (sub-octet codes + scales, retained share at bf16).
double analytic_size_bytes(double params, numerics::ScalarFormat f, uint32_t block_size);

} // namespace nlpe::model

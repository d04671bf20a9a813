#pragma once
// Nonlinear activation functions over the shared CORDIC cores: sigmoid, tanh,
// ReLU and softmax, plus the reconfigured GeLU / swish / SELU forms. Scalar
// kinds evaluate elementwise; softmax is the one vector-to-vector kind.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "nlpe/naf/cordic.hpp"
#include "nlpe/numerics/formats.hpp"

namespace nlpe::naf {

using numerics::EncodedScalar;
using numerics::ScalarFormat;

enum class NafKind { Sigmoid, Tanh, ReLU, SoftMax, GeLU, Swish, Selu };

const char* naf_name(NafKind k);
NafKind naf_from_name(const std::string& name);

// Internal-precision evaluation (before output encode). kind != SoftMax.
//   sigmoid(x) = div(1, 1 + exp(-x))
//   tanh(x)    = sign(x) * (2 sigmoid(2|x|) - 1)   (odd by construction)
//   gelu(x)    = 0.5 x (1 + tanh(sqrt(2/pi) (x + 0.044715 x^3)))
//   swish(x)   = x sigmoid(x)
//   selu(x)    = lambda x | lambda alpha (exp(x) - 1)
double naf_eval(double x, NafKind kind, const CordicConfig& cfg);

// Max-subtracted exp-then-normalize softmax at internal precision.
std::vector<double> softmax(std::span<const double> xs, const CordicConfig& cfg);

// Lane-level evaluation: decode at cfg.io, evaluate, encode back at cfg.io.
EncodedScalar naf_eval_io(EncodedScalar x, NafKind kind, const CordicConfig& cfg);

// One issue batch for the MIMD vector array: 2 fp8 lanes or 1 bf16 lane per
// cycle. All lanes share one format.
struct NafBatch {
    std::vector<EncodedScalar> inputs;
    NafKind kind = NafKind::Sigmoid;

    int lanes_per_cycle() const;
};

// Evaluate a batch lane by lane (softmax treats the batch as one vector).
std::vector<EncodedScalar> naf_batch_eval(const NafBatch& batch, const CordicConfig& cfg);

// ceil(n / lanes_per_cycle) * (iterations + 4); 2 fp8 lanes or 1 bf16 lane
// per cycle.
uint64_t naf_vector_cycles(uint64_t n_lanes, ScalarFormat precision, int iterations);

// High-precision reference for the same functional forms (libm based).
double naf_reference(double x, NafKind kind);

struct NafSweepRow {
    NafKind kind;
    ScalarFormat precision;
    int iterations;
    double max_abs_err;
    double mean_abs_err;
};

// Error grid vs naf_reference: inputs quantized at cfg.io, outputs compared
// at internal precision.
NafSweepRow accuracy_sweep(NafKind kind, const CordicConfig& cfg,
                           int grid_points = 4096, double lo = -8.0, double hi = 8.0);

} // namespace nlpe::naf

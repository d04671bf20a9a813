#include "nlpe/naf/naf.hpp"

#include <cmath>
#include <stdexcept>

namespace nlpe::naf {

namespace {

constexpr double kSeluAlpha = 1.6732632;
constexpr double kSeluLambda = 1.0507010;
constexpr double kGeluC = 0.7978845608028654; // sqrt(2/pi)
constexpr double kGeluA = 0.044715;

double sigmoid_cordic(double x, const CordicConfig& cfg) {
    double e = cordic_exp(-x, cfg);
    return cordic_div(1.0, 1.0 + e, cfg);
}

// Odd by construction: evaluate on |x|, restore the sign (zero-detect keeps
// tanh(0) exact).
double tanh_cordic(double x, const CordicConfig& cfg) {
    if (x == 0.0) return 0.0;
    double t = 2.0 * sigmoid_cordic(2.0 * std::fabs(x), cfg) - 1.0;
    return x < 0 ? -t : t;
}

} // namespace

double naf_eval(double x, NafKind kind, const CordicConfig& cfg) {
    switch (kind) {
        case NafKind::Sigmoid:
            return sigmoid_cordic(x, cfg);
        case NafKind::Tanh:
            return tanh_cordic(x, cfg);
        case NafKind::ReLU:
            return x > 0 ? x : 0.0;
        case NafKind::GeLU:
            return 0.5 * x * (1.0 + tanh_cordic(kGeluC * (x + kGeluA * x * x * x), cfg));
        case NafKind::Swish:
            return x * sigmoid_cordic(x, cfg);
        case NafKind::Selu:
            return x > 0 ? kSeluLambda * x
                         : kSeluLambda * kSeluAlpha * (cordic_exp(x, cfg) - 1.0);
        case NafKind::SoftMax:
            throw std::invalid_argument("softmax is vector-to-vector; use softmax()");
    }
    throw std::invalid_argument("bad naf kind");
}

std::vector<double> softmax(std::span<const double> xs, const CordicConfig& cfg) {
    if (xs.empty()) throw std::invalid_argument("softmax: empty input");
    double mx = xs[0];
    for (double v : xs) mx = std::max(mx, v);
    std::vector<double> es(xs.size());
    double sum = 0.0;
    for (size_t i = 0; i < xs.size(); ++i) {
        es[i] = cordic_exp(xs[i] - mx, cfg);
        sum += es[i];
    }
    for (auto& e : es) e = std::min(cordic_div(e, sum, cfg), 1.0);
    return es;
}

EncodedScalar naf_eval_io(EncodedScalar x, NafKind kind, const CordicConfig& cfg) {
    double v = numerics::decode_bits(x.bits, x.format);
    return numerics::encode(naf_eval(v, kind, cfg), cfg.io);
}

int NafBatch::lanes_per_cycle() const {
    if (inputs.empty()) return 1;
    return inputs[0].format == ScalarFormat::Fp8 ? 2 : 1;
}

std::vector<EncodedScalar> naf_batch_eval(const NafBatch& batch, const CordicConfig& cfg) {
    if (batch.inputs.empty()) throw std::invalid_argument("naf batch: empty");
    const ScalarFormat f = batch.inputs[0].format;
    for (const auto& lane : batch.inputs)
        if (lane.format != f)
            throw std::invalid_argument("naf batch: lanes must share one format");
    std::vector<EncodedScalar> out(batch.inputs.size());
    if (batch.kind == NafKind::SoftMax) {
        std::vector<double> xs(batch.inputs.size());
        for (size_t i = 0; i < xs.size(); ++i)
            xs[i] = numerics::decode(batch.inputs[i]);
        auto sm = softmax(xs, cfg);
        for (size_t i = 0; i < xs.size(); ++i)
            out[i] = numerics::encode(sm[i], cfg.io);
        return out;
    }
    for (size_t i = 0; i < out.size(); ++i)
        out[i] = naf_eval_io(batch.inputs[i], batch.kind, cfg);
    return out;
}

uint64_t naf_vector_cycles(uint64_t n_lanes, ScalarFormat precision, int iterations) {
    if (n_lanes < 1) throw std::invalid_argument("naf_vector_cycles: n >= 1");
    uint64_t per_cycle = precision == ScalarFormat::Fp8 ? 2 : 1;
    uint64_t issues = (n_lanes + per_cycle - 1) / per_cycle;
    return issues * (uint64_t)(iterations + 4);
}

double naf_reference(double x, NafKind kind) {
    switch (kind) {
        case NafKind::Sigmoid: return 1.0 / (1.0 + std::exp(-x));
        case NafKind::Tanh: return std::tanh(x);
        case NafKind::ReLU: return x > 0 ? x : 0.0;
        case NafKind::GeLU:
            return 0.5 * x * (1.0 + std::tanh(kGeluC * (x + kGeluA * x * x * x)));
        case NafKind::Swish: return x / (1.0 + std::exp(-x));
        case NafKind::Selu:
            return x > 0 ? kSeluLambda * x : kSeluLambda * kSeluAlpha * (std::exp(x) - 1.0);
        case NafKind::SoftMax:
            throw std::invalid_argument("softmax has no scalar reference");
    }
    throw std::invalid_argument("bad naf kind");
}

NafSweepRow accuracy_sweep(NafKind kind, const CordicConfig& cfg, int grid_points,
                           double lo, double hi) {
    NafSweepRow row{kind, cfg.io, cfg.iterations, 0.0, 0.0};
    for (int i = 0; i < grid_points; ++i) {
        double x = lo + (hi - lo) * i / (grid_points - 1);
        double xq = numerics::decode_bits(numerics::encode_bits(x, cfg.io), cfg.io);
        double err = std::fabs(naf_eval(xq, kind, cfg) - naf_reference(xq, kind));
        row.max_abs_err = std::max(row.max_abs_err, err);
        row.mean_abs_err += err;
    }
    row.mean_abs_err /= grid_points;
    return row;
}

const char* naf_name(NafKind k) {
    switch (k) {
        case NafKind::Sigmoid: return "sigmoid";
        case NafKind::Tanh: return "tanh";
        case NafKind::ReLU: return "relu";
        case NafKind::SoftMax: return "softmax";
        case NafKind::GeLU: return "gelu";
        case NafKind::Swish: return "swish";
        case NafKind::Selu: return "selu";
    }
    return "?";
}

NafKind naf_from_name(const std::string& name) {
    for (auto k : {NafKind::Sigmoid, NafKind::Tanh, NafKind::ReLU, NafKind::SoftMax,
                   NafKind::GeLU, NafKind::Swish, NafKind::Selu})
        if (name == naf_name(k)) return k;
    throw std::invalid_argument("unknown naf kind: " + name);
}

} // namespace nlpe::naf

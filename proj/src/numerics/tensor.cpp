#include "nlpe/numerics/tensor.hpp"

#include <cmath>
#include <stdexcept>

namespace nlpe::numerics {

uint64_t numel_of(const std::vector<uint32_t>& dims) {
    uint64_t n = 1;
    for (uint32_t d : dims) n *= d;
    return n;
}

Tensor Tensor::zeros(std::vector<uint32_t> dims, ScalarFormat f) {
    Tensor t;
    t.dims_ = std::move(dims);
    t.format_ = f;
    uint64_t n = t.numel();
    if (f == ScalarFormat::Ref) {
        t.ref_.assign(n, 0.0);
    } else {
        t.packed_.assign((n * bit_width(f) + 7) / 8, 0);
    }
    return t;
}

Tensor Tensor::from_ref(std::vector<uint32_t> dims, std::vector<double> values) {
    if (numel_of(dims) != values.size())
        throw std::invalid_argument("from_ref: dims/values size mismatch");
    Tensor t;
    t.dims_ = std::move(dims);
    t.format_ = ScalarFormat::Ref;
    t.ref_ = std::move(values);
    return t;
}

uint64_t Tensor::numel() const { return numel_of(dims_); }

uint16_t Tensor::code_at(uint64_t i) const {
    switch (bit_width(format_)) {
        case 4: {
            uint8_t b = packed_[i / 2];
            return (i % 2 == 0) ? (b & 0xF) : (b >> 4);
        }
        case 8:
            return packed_[i];
        case 16:
            return (uint16_t)(packed_[2 * i] | (packed_[2 * i + 1] << 8));
        default:
            throw std::logic_error("code_at on ref tensor");
    }
}

void Tensor::set_code(uint64_t i, uint16_t bits) {
    switch (bit_width(format_)) {
        case 4: {
            uint8_t& b = packed_[i / 2];
            if (i % 2 == 0)
                b = (uint8_t)((b & 0xF0) | (bits & 0xF));
            else
                b = (uint8_t)((b & 0x0F) | ((bits & 0xF) << 4));
            break;
        }
        case 8:
            packed_[i] = (uint8_t)bits;
            break;
        case 16:
            packed_[2 * i] = (uint8_t)(bits & 0xFF);
            packed_[2 * i + 1] = (uint8_t)(bits >> 8);
            break;
        default:
            throw std::logic_error("set_code on ref tensor");
    }
}

double Tensor::scale_for(uint64_t i) const {
    if (!params_) return 1.0;
    return params_->scales[i / params_->block_size];
}

double Tensor::value_at(uint64_t i) const {
    if (format_ == ScalarFormat::Ref) return ref_[i];
    return decode_bits(code_at(i), format_) * scale_for(i);
}

uint64_t tensor_size_bytes(const std::vector<uint32_t>& dims, ScalarFormat f,
                           uint32_t block_size) {
    if (dims.empty()) throw std::invalid_argument("tensor_size_bytes: empty dims");
    uint64_t n = numel_of(dims);
    uint64_t bytes = (n * bit_width(f) + 7) / 8;
    if (block_size > 0) bytes += ((n + block_size - 1) / block_size) * 2;
    return bytes;
}

Tensor quantize_tensor(const Tensor& ref, ScalarFormat f, uint32_t block_size) {
    if (f == ScalarFormat::Ref) throw std::invalid_argument("quantize to ref");
    if (block_size < 1) throw std::invalid_argument("block_size must be >= 1");
    if (ref.format() != ScalarFormat::Ref)
        throw std::invalid_argument("quantize_tensor expects a ref tensor");
    const uint64_t n = ref.numel();
    if (n == 0) throw std::invalid_argument("quantize_tensor: empty tensor");

    Tensor out = Tensor::zeros(ref.dims(), f);
    const uint64_t n_blocks = (n + block_size - 1) / block_size;
    QuantParams params;
    params.block_size = block_size;
    params.scales.resize(n_blocks);

    const bool scaled = f != ScalarFormat::Bf16;
    for (uint64_t b = 0; b < n_blocks; ++b) {
        const uint64_t lo = b * block_size;
        const uint64_t hi = std::min<uint64_t>(lo + block_size, n);
        double scale = 1.0;
        if (scaled) {
            double amax = 0.0;
            for (uint64_t i = lo; i < hi; ++i)
                amax = std::max(amax, std::fabs(ref.ref_data()[i]));
            if (amax > 0.0) scale = amax / max_code_magnitude(f);
            // scales live in bf16 storage; quantize now so encode sees the
            // value every later consumer will see
            scale = decode_bits(encode_bits(scale, ScalarFormat::Bf16), ScalarFormat::Bf16);
            if (scale <= 0.0) scale = 1.0;
        }
        params.scales[b] = scale;
        for (uint64_t i = lo; i < hi; ++i)
            out.set_code(i, encode_bits(ref.ref_data()[i] / scale, f));
    }
    out.set_params(std::move(params));
    return out;
}

Tensor dequantize_tensor(const Tensor& t) {
    if (t.format() == ScalarFormat::Ref) return t;
    Tensor out = Tensor::zeros(t.dims(), ScalarFormat::Ref);
    const uint64_t n = t.numel();
    for (uint64_t i = 0; i < n; ++i) out.ref_data()[i] = t.value_at(i);
    return out;
}

} // namespace nlpe::numerics

#pragma once
// Tensor storage: dims + format tag + per-block scales + bit-packed payload.
// Sub-octet codes are packed low-nibble first; every payload is padded to a
// byte boundary. Ref tensors hold doubles and never carry quantization params.

#include <cstdint>
#include <optional>
#include <vector>

#include "nlpe/numerics/formats.hpp"

namespace nlpe::numerics {

struct QuantParams {
    uint32_t block_size = 0;     // scalars per scale block, >= 1
    std::vector<double> scales;  // one per block, > 0; stored as bf16 values
};

class Tensor {
  public:
    Tensor() = default;

    static Tensor zeros(std::vector<uint32_t> dims, ScalarFormat f);
    static Tensor from_ref(std::vector<uint32_t> dims, std::vector<double> values);

    const std::vector<uint32_t>& dims() const { return dims_; }
    ScalarFormat format() const { return format_; }
    const std::optional<QuantParams>& params() const { return params_; }
    void set_params(QuantParams p) { params_ = std::move(p); }

    uint64_t numel() const;

    // Packed code access (non-Ref formats).
    uint16_t code_at(uint64_t i) const;
    void set_code(uint64_t i, uint16_t bits);
    const std::vector<uint8_t>& payload() const { return packed_; }
    std::vector<uint8_t>& payload() { return packed_; }

    // Ref access.
    const std::vector<double>& ref_data() const { return ref_; }
    std::vector<double>& ref_data() { return ref_; }

    // Decoded value at flat index i, block scale applied when present.
    double value_at(uint64_t i) const;

    double scale_for(uint64_t i) const;

  private:
    std::vector<uint32_t> dims_;
    ScalarFormat format_ = ScalarFormat::Ref;
    std::optional<QuantParams> params_;
    std::vector<uint8_t> packed_;
    std::vector<double> ref_;
};

uint64_t numel_of(const std::vector<uint32_t>& dims);

// Deployment footprint in bytes: packed payload rounded up to whole bytes,
// plus one bf16 scale per block when block_size > 0.
uint64_t tensor_size_bytes(const std::vector<uint32_t>& dims, ScalarFormat f,
                           uint32_t block_size);

// Symmetric per-block quantization. Per block: scale = max|v| / max code
// magnitude (1 for an all-zero block), rounded to bf16 since that is how
// scales are stored; codes = encode(v / scale). Bf16 target keeps scale 1.
Tensor quantize_tensor(const Tensor& ref, ScalarFormat f, uint32_t block_size);

// value = decode(code) * block scale, as a Ref tensor.
Tensor dequantize_tensor(const Tensor& t);

} // namespace nlpe::numerics

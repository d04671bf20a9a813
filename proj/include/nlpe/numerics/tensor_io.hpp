#pragma once
// Tensor container file, little-endian:
//   magic "NLPE", u16 version=1, u32 tensor count, then per tensor:
//   u16 name length, name bytes, u8 format tag, u8 ndim, u32 dims[],
//   u32 block_size (0 = none), scales as bf16 array, packed payload padded
//   to a byte boundary. Ref payloads are stored as little-endian f64.

#include <iosfwd>
#include <map>
#include <string>

#include "nlpe/numerics/tensor.hpp"

namespace nlpe::numerics {

using TensorMap = std::map<std::string, Tensor>;

void write_tensors(std::ostream& os, const TensorMap& tensors);
TensorMap read_tensors(std::istream& is);

void save_tensors(const std::string& path, const TensorMap& tensors);
TensorMap load_tensors(const std::string& path);

} // namespace nlpe::numerics

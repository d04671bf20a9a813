#include "nlpe/numerics/tensor_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace nlpe::numerics {

namespace {

constexpr char kMagic[4] = {'N', 'L', 'P', 'E'};
constexpr uint16_t kVersion = 1;

template <typename T>
void put(std::ostream& os, T v) {
    uint8_t buf[sizeof(T)];
    for (size_t i = 0; i < sizeof(T); ++i) buf[i] = (uint8_t)((uint64_t)v >> (8 * i));
    os.write((const char*)buf, sizeof(T));
}

template <typename T>
T get(std::istream& is) {
    uint8_t buf[sizeof(T)];
    is.read((char*)buf, sizeof(T));
    if (!is) throw std::runtime_error("tensor file: truncated");
    uint64_t v = 0;
    for (size_t i = 0; i < sizeof(T); ++i) v |= (uint64_t)buf[i] << (8 * i);
    return (T)v;
}

} // namespace

void write_tensors(std::ostream& os, const TensorMap& tensors) {
    os.write(kMagic, 4);
    put<uint16_t>(os, kVersion);
    put<uint32_t>(os, (uint32_t)tensors.size());
    for (const auto& [name, t] : tensors) {
        put<uint16_t>(os, (uint16_t)name.size());
        os.write(name.data(), (std::streamsize)name.size());
        put<uint8_t>(os, (uint8_t)t.format());
        put<uint8_t>(os, (uint8_t)t.dims().size());
        for (uint32_t d : t.dims()) put<uint32_t>(os, d);
        const auto& params = t.params();
        put<uint32_t>(os, params ? params->block_size : 0);
        if (params)
            for (double s : params->scales)
                put<uint16_t>(os, encode_bits(s, ScalarFormat::Bf16));
        if (t.format() == ScalarFormat::Ref) {
            for (double v : t.ref_data()) put<uint64_t>(os, std::bit_cast<uint64_t>(v));
        } else {
            os.write((const char*)t.payload().data(), (std::streamsize)t.payload().size());
        }
    }
}

TensorMap read_tensors(std::istream& is) {
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, kMagic, 4) != 0)
        throw std::runtime_error("tensor file: bad magic");
    if (get<uint16_t>(is) != kVersion) throw std::runtime_error("tensor file: bad version");
    uint32_t count = get<uint32_t>(is);
    TensorMap out;
    for (uint32_t k = 0; k < count; ++k) {
        uint16_t name_len = get<uint16_t>(is);
        std::string name(name_len, '\0');
        is.read(name.data(), name_len);
        auto fmt = (ScalarFormat)get<uint8_t>(is);
        uint8_t ndim = get<uint8_t>(is);
        std::vector<uint32_t> dims(ndim);
        for (auto& d : dims) d = get<uint32_t>(is);
        uint32_t block_size = get<uint32_t>(is);
        Tensor t = Tensor::zeros(dims, fmt);
        uint64_t n = t.numel();
        if (block_size > 0) {
            QuantParams params;
            params.block_size = block_size;
            params.scales.resize((n + block_size - 1) / block_size);
            for (auto& s : params.scales)
                s = decode_bits(get<uint16_t>(is), ScalarFormat::Bf16);
            t.set_params(std::move(params));
        }
        if (fmt == ScalarFormat::Ref) {
            for (auto& v : t.ref_data()) v = std::bit_cast<double>(get<uint64_t>(is));
        } else {
            is.read((char*)t.payload().data(), (std::streamsize)t.payload().size());
        }
        if (!is) throw std::runtime_error("tensor file: truncated");
        out.emplace(std::move(name), std::move(t));
    }
    return out;
}

void save_tensors(const std::string& path, const TensorMap& tensors) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open for write: " + path);
    write_tensors(os, tensors);
}

TensorMap load_tensors(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open: " + path);
    return read_tensors(is);
}

} // namespace nlpe::numerics

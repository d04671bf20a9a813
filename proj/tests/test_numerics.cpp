#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "nlpe/numerics/formats.hpp"
#include "nlpe/numerics/simd_word.hpp"
#include "nlpe/numerics/tensor.hpp"
#include "nlpe/numerics/tensor_io.hpp"
#include "nlpe/util/rng.hpp"

using namespace nlpe;
using numerics::ScalarFormat;
using numerics::Tensor;

TEST_CASE("decode: frozen values") {
    CHECK(numerics::decode_bits(0b0000, ScalarFormat::Fp4) == 0.0);
    CHECK(numerics::decode_bits(0b0111, ScalarFormat::Fp4) == 6.0);
    CHECK(numerics::decode_bits(0b1000, ScalarFormat::Int4) == -8.0);
    CHECK(numerics::decode_bits(0x38, ScalarFormat::Fp8) == 1.0);
    CHECK(numerics::decode_bits(0x3F80, ScalarFormat::Bf16) == 1.0);
    // E4M3 NaN slot and the values around it
    CHECK(std::isnan(numerics::decode_bits(0x7F, ScalarFormat::Fp8)));
    CHECK(std::isnan(numerics::decode_bits(0xFF, ScalarFormat::Fp8)));
    CHECK(numerics::decode_bits(0x7E, ScalarFormat::Fp8) == 448.0);
    // bf16 specials
    CHECK(std::isinf(numerics::decode_bits(0x7F80, ScalarFormat::Bf16)));
    CHECK(std::isnan(numerics::decode_bits(0x7FC1, ScalarFormat::Bf16)));
}

TEST_CASE("encode: frozen values") {
    CHECK(numerics::encode_bits(1.0, ScalarFormat::Fp8) == 0x38);
    CHECK(numerics::encode_bits(100.0, ScalarFormat::Fp4) == 0x7); // saturates at 6.0
    CHECK(numerics::encode_bits(0.0, ScalarFormat::Bf16) == 0x0000);
    // rne ties
    CHECK(numerics::decode_bits(numerics::encode_bits(5.0, ScalarFormat::Fp4),
                                ScalarFormat::Fp4) == 4.0); // tie, even mantissa
    CHECK(numerics::decode_bits(numerics::encode_bits(464.0, ScalarFormat::Fp8),
                                ScalarFormat::Fp8) == 448.0);
    CHECK(numerics::encode_bits(1e40, ScalarFormat::Bf16) == 0x7F80); // inf
    CHECK(numerics::encode_bits(-1e40, ScalarFormat::Fp8) == 0xFE);  // saturate
    // int rne
    CHECK(numerics::decode_bits(numerics::encode_bits(-3.5, ScalarFormat::Int4),
                                ScalarFormat::Int4) == -4.0);
    CHECK(numerics::decode_bits(numerics::encode_bits(3.5, ScalarFormat::Int4),
                                ScalarFormat::Int4) == 4.0);
}

TEST_CASE("fp4 value set") {
    double expect[8] = {0.0, 0.5, 1.0, 1.5, 2.0, 3.0, 4.0, 6.0};
    for (int i = 0; i < 8; ++i) {
        CHECK(numerics::decode_bits((uint16_t)i, ScalarFormat::Fp4) == expect[i]);
        CHECK(numerics::decode_bits((uint16_t)(8 | i), ScalarFormat::Fp4) == -expect[i]);
    }
}

TEST_CASE("round-trip: exhaustive over all patterns") {
    auto canonical = [](ScalarFormat f, uint16_t bits) {
        double v = numerics::decode_bits(bits, f);
        return numerics::encode_bits(v, f);
    };
    for (uint32_t b = 0; b < 16; ++b) {
        CHECK(canonical(ScalarFormat::Int4, (uint16_t)b) == b);
        CHECK(canonical(ScalarFormat::Fp4, (uint16_t)b) == b);
    }
    for (uint32_t b = 0; b < 256; ++b) {
        CHECK(canonical(ScalarFormat::Int8, (uint16_t)b) == b);
        double v = numerics::decode_bits((uint16_t)b, ScalarFormat::Fp8);
        uint16_t back = numerics::encode_bits(v, ScalarFormat::Fp8);
        if (std::isnan(v))
            CHECK(back == 0x7F); // canonical NaN
        else
            CHECK(back == b);
    }
    int failures = 0;
    for (uint32_t b = 0; b < 65536; ++b) {
        double v = numerics::decode_bits((uint16_t)b, ScalarFormat::Bf16);
        uint16_t back = numerics::encode_bits(v, ScalarFormat::Bf16);
        if (std::isnan(v)) {
            if (back != 0x7FC0) ++failures;
        } else if (back != b) {
            ++failures;
        }
    }
    CHECK(failures == 0);
}

TEST_CASE("encode is order-preserving up to ties") {
    util::Rng rng(7);
    for (auto f : {ScalarFormat::Int4, ScalarFormat::Fp4, ScalarFormat::Fp8,
                   ScalarFormat::Bf16}) {
        std::vector<double> xs;
        for (int i = 0; i < 4000; ++i) xs.push_back(rng.uniform(-500.0, 500.0));
        std::sort(xs.begin(), xs.end());
        double prev = numerics::decode_bits(numerics::encode_bits(xs[0], f), f);
        for (size_t i = 1; i < xs.size(); ++i) {
            double cur = numerics::decode_bits(numerics::encode_bits(xs[i], f), f);
            CHECK(cur >= prev);
            prev = cur;
        }
    }
}

TEST_CASE("pack/unpack: frozen layouts") {
    using numerics::EncodedScalar;
    std::vector<EncodedScalar> int_lanes;
    for (uint16_t b : {1, 2, 3, 4, 5, 6})
        int_lanes.push_back({ScalarFormat::Int4, b});
    auto w = numerics::pack(int_lanes, mac::MacMode::Int4x6);
    CHECK(w.raw == 0x654321u);
    CHECK(numerics::unpack(w) == int_lanes);

    std::vector<EncodedScalar> one{{ScalarFormat::Bf16, 0x3F80}};
    CHECK(numerics::pack(one, mac::MacMode::Bf16x1).raw == 0x003F80u);

    std::vector<EncodedScalar> zeros(3, EncodedScalar{ScalarFormat::Fp8, 0});
    CHECK(numerics::pack(zeros, mac::MacMode::Fp8x3).raw == 0u);

    CHECK_THROWS(numerics::pack(one, mac::MacMode::Fp8x3));
    CHECK_THROWS(numerics::pack(zeros, mac::MacMode::Bf16x1));
}

TEST_CASE("pack/unpack: randomized round trip, all modes") {
    util::Rng rng(11);
    for (auto m : {mac::MacMode::Int4x6, mac::MacMode::Fp4x6, mac::MacMode::Fp8x3,
                   mac::MacMode::Bf16x1}) {
        auto f = mac::lane_format(m);
        unsigned width = numerics::bit_width(f);
        for (int t = 0; t < 200; ++t) {
            std::vector<numerics::EncodedScalar> lanes;
            for (int i = 0; i < mac::lane_count(m); ++i)
                lanes.push_back({f, (uint16_t)(rng.next_u64() & ((1u << width) - 1))});
            CHECK(numerics::unpack(numerics::pack(lanes, m)) == lanes);
        }
    }
}

TEST_CASE("quantize_tensor: frozen block example") {
    Tensor t = Tensor::from_ref({4}, {-3.5, 3.5, 0.0, 7.0});
    Tensor q = numerics::quantize_tensor(t, ScalarFormat::Int4, 4);
    REQUIRE(q.params().has_value());
    CHECK(q.params()->scales[0] == 1.0);
    CHECK(numerics::decode_bits(q.code_at(0), ScalarFormat::Int4) == -4.0); // rne of -3.5
    CHECK(numerics::decode_bits(q.code_at(1), ScalarFormat::Int4) == 4.0);
    CHECK(numerics::decode_bits(q.code_at(2), ScalarFormat::Int4) == 0.0);
    CHECK(numerics::decode_bits(q.code_at(3), ScalarFormat::Int4) == 7.0);
}

TEST_CASE("quantize_tensor: all-zero block and bf16 fixpoint") {
    Tensor z = Tensor::from_ref({3}, {0.0, 0.0, 0.0});
    Tensor q = numerics::quantize_tensor(z, ScalarFormat::Fp4, 4);
    CHECK(q.params()->scales[0] == 1.0);
    for (int i = 0; i < 3; ++i) CHECK(q.value_at((uint64_t)i) == 0.0);

    Tensor b = Tensor::from_ref({4}, {1.0, -0.5, 3.25, 128.0});
    Tensor qb = numerics::quantize_tensor(b, ScalarFormat::Bf16, 4);
    Tensor back = numerics::dequantize_tensor(qb);
    for (int i = 0; i < 4; ++i) CHECK(back.ref_data()[(size_t)i] == b.ref_data()[(size_t)i]);

    CHECK_THROWS(numerics::quantize_tensor(Tensor::from_ref({}, {}), ScalarFormat::Int4, 4));
}

// local gap of the representable grid straddling u
static double grid_gap(double u, ScalarFormat f) {
    static std::map<ScalarFormat, std::vector<double>> grids;
    auto& grid = grids[f];
    if (grid.empty()) {
        unsigned width = numerics::bit_width(f);
        for (uint32_t b = 0; b < (1u << width); ++b) {
            double w = numerics::decode_bits((uint16_t)b, f);
            if (!std::isnan(w) && !std::isinf(w)) grid.push_back(w);
        }
        std::sort(grid.begin(), grid.end());
        grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    }
    auto hi = std::upper_bound(grid.begin(), grid.end(), u);
    if (hi == grid.end()) return grid.back() - *(grid.end() - 2);   // beyond max
    if (hi == grid.begin()) return *(grid.begin() + 1) - grid.front();
    return *hi - *(hi - 1);
}

TEST_CASE("quantization error bound") {
    util::Rng rng(3);
    for (auto f : {ScalarFormat::Int4, ScalarFormat::Int8, ScalarFormat::Fp4,
                   ScalarFormat::Fp8}) {
        for (int t = 0; t < 50; ++t) {
            std::vector<double> vals;
            for (int i = 0; i < 64; ++i) vals.push_back(rng.normal(0, 2.0));
            Tensor ref = Tensor::from_ref({64}, vals);
            Tensor q = numerics::quantize_tensor(ref, f, 16);
            for (int i = 0; i < 64; ++i) {
                double x = vals[(size_t)i];
                double scale = q.scale_for((uint64_t)i);
                double err = std::fabs(x - q.value_at((uint64_t)i));
                double gap = grid_gap(x / scale, f);
                CHECK(err <= scale * gap / 2 + 1e-12);
            }
        }
    }
}

TEST_CASE("tensor_size_bytes: frozen accounting") {
    CHECK(numerics::tensor_size_bytes({600000000}, ScalarFormat::Ref, 0) == 2400000000ull);
    CHECK(numerics::tensor_size_bytes({600000000}, ScalarFormat::Fp4, 64) ==
          300000000ull + 18750000ull);
    CHECK(numerics::tensor_size_bytes({1}, ScalarFormat::Int8, 1) == 3ull);
    CHECK_THROWS(numerics::tensor_size_bytes({}, ScalarFormat::Int8, 1));
}

TEST_CASE("tensor file round trip") {
    util::Rng rng(5);
    numerics::TensorMap m;
    std::vector<double> vals;
    for (int i = 0; i < 100; ++i) vals.push_back(rng.normal());
    Tensor ref = Tensor::from_ref({10, 10}, vals);
    m["ref"] = ref;
    m["w.int4"] = numerics::quantize_tensor(ref, ScalarFormat::Int4, 16);
    m["w.fp8"] = numerics::quantize_tensor(ref, ScalarFormat::Fp8, 32);
    m["w.bf16"] = numerics::quantize_tensor(ref, ScalarFormat::Bf16, 64);

    std::stringstream ss;
    numerics::write_tensors(ss, m);
    auto m2 = numerics::read_tensors(ss);
    REQUIRE(m2.size() == m.size());
    for (const auto& [name, t] : m) {
        const Tensor& u = m2.at(name);
        CHECK(u.format() == t.format());
        CHECK(u.dims() == t.dims());
        for (uint64_t i = 0; i < t.numel(); ++i) CHECK(u.value_at(i) == t.value_at(i));
    }
    // header is pinned little-endian
    std::string head = ss.str().substr(0, 6);
    CHECK(head.substr(0, 4) == "NLPE");
    CHECK((uint8_t)head[4] == 1);
    CHECK((uint8_t)head[5] == 0);
}

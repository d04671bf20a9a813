#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "nlpe/mac/mac.hpp"
#include "nlpe/util/rng.hpp"
#include "nlpe/verify/mac_reference.hpp"

using namespace nlpe;
using mac::MacMode;
using numerics::ScalarFormat;

TEST_CASE("rmmec blocks") {
    CHECK(mac::rmmec_multiply(0xF, 0xF) == 0xE1);
    CHECK(mac::rmmec_multiply(0x0, 0xB) == 0x00);
    CHECK(mac::rmmec_multiply(0x7, 0x6) == 0x2A);
    CHECK_THROWS(mac::rmmec_multiply(16, 1));

    int e1[] = {3, 5, 2};
    auto r = mac::rmmec_compare(e1);
    CHECK(r.max_exp == 5);
    CHECK(r.diffs[0] == 2);
    CHECK(r.diffs[1] == 0);
    CHECK(r.diffs[2] == 3);

    int e2[] = {4, 4, 4};
    r = mac::rmmec_compare(e2);
    CHECK(r.max_exp == 4);
    CHECK(r.diffs[0] == 0);

    int e3[] = {0, 15};
    r = mac::rmmec_compare(e3);
    CHECK(r.max_exp == 15);
    CHECK(r.diffs[0] == 15);
    CHECK(r.diffs[1] == 0);
}

TEST_CASE("mac_step: frozen small cases") {
    // int4 lanes, unit b vector
    std::vector<double> a{1, 2, 3, -4, 5, 6}, b{1, 1, 1, 1, 1, 1};
    auto dot = mac::dot_product(a, b, MacMode::Int4x6, ScalarFormat::Bf16);
    CHECK(dot.quire.value() == 13.0);
    CHECK(numerics::decode(dot.result.value) == 13.0);
    CHECK(!dot.result.exception);

    // fp4 identity products
    std::vector<double> ones{1, 1, 1, 1, 1, 1};
    dot = mac::dot_product(ones, ones, MacMode::Fp4x6, ScalarFormat::Bf16);
    CHECK(dot.quire.value() == 6.0);

    // bf16 lane with addend
    std::vector<double> x{1.5}, y{2.0};
    dot = mac::dot_product(x, y, MacMode::Bf16x1, ScalarFormat::Bf16, 0.25);
    CHECK(dot.quire.value() == 3.25);
    auto rd = mac::quire_read(dot.quire, ScalarFormat::Fp8);
    CHECK(numerics::decode(rd.value) == 3.25);
    CHECK(!rd.exception);
}

TEST_CASE("quire_read: zero quire") {
    mac::Quire q = mac::make_quire(ScalarFormat::Bf16);
    auto r = mac::quire_read(q, ScalarFormat::Bf16);
    CHECK(numerics::decode(r.value) == 0.0);
    CHECK(!r.exception);
}

TEST_CASE("dot_product: unit vector and validation") {
    std::vector<double> a{1, 0, 0, 0, 0, 0};
    auto dot = mac::dot_product(a, a, MacMode::Int4x6, ScalarFormat::Bf16);
    CHECK(numerics::decode(dot.result.value) == 1.0);
    CHECK(dot.issues == 1);

    std::vector<double> empty;
    CHECK_THROWS(mac::dot_product(empty, empty, MacMode::Int4x6, ScalarFormat::Bf16));
    std::vector<double> one{1.0};
    CHECK_THROWS(mac::dot_product(one, a, MacMode::Int4x6, ScalarFormat::Bf16));
}

TEST_CASE("int4 dot products match the exact integer oracle") {
    util::Rng rng(101);
    int checked = 0;
    for (int t = 0; t < 20000; ++t) {
        static const size_t kLens[3] = {6, 12, 24};
        size_t len = kLens[t % 3];
        std::vector<double> a(len), b(len);
        long long exact = 0;
        for (size_t i = 0; i < len; ++i) {
            a[i] = (double)rng.uniform_int(-8, 7);
            b[i] = (double)rng.uniform_int(-8, 7);
            exact += (long long)a[i] * (long long)b[i];
        }
        auto dot = mac::dot_product(a, b, MacMode::Int4x6, ScalarFormat::Bf16);
        if (std::abs(exact) < (1ll << 16)) { // fits the quire
            CHECK(dot.quire.value() == (double)exact);
            ++checked;
        }
    }
    CHECK(checked == 20000);

    // fp8-output quire (W=8) with sums kept inside 2^8
    for (int t = 0; t < 5000; ++t) {
        std::vector<double> a(12), b(12);
        long long exact = 0;
        for (size_t i = 0; i < 12; ++i) {
            a[i] = (double)rng.uniform_int(-2, 2);
            b[i] = (double)rng.uniform_int(-2, 2);
            exact += (long long)a[i] * (long long)b[i];
        }
        auto dot = mac::dot_product(a, b, MacMode::Int4x6, ScalarFormat::Fp8);
        if (std::abs(exact) < (1ll << 8)) {
            CHECK(dot.quire.value() == (double)exact);
        }
    }
}

TEST_CASE("fp dot products are bit-identical to the reference model") {
    util::Rng rng(202);
    for (auto mode : {MacMode::Fp4x6, MacMode::Fp8x3, MacMode::Bf16x1}) {
        for (auto out : {ScalarFormat::Fp8, ScalarFormat::Bf16}) {
            int mismatches = 0;
            for (int t = 0; t < 4000; ++t) {
                size_t len = 3 * (1 + (size_t)(t % 8));
                std::vector<double> a(len), b(len);
                for (size_t i = 0; i < len; ++i) {
                    a[i] = rng.normal(0, 8.0);
                    b[i] = rng.normal(0, 8.0);
                }
                double addend = (t % 4 == 0) ? rng.normal(0, 2.0) : 0.0;
                auto dut = mac::dot_product(a, b, mode, out, addend);
                auto ref = verify::reference_dot(a, b, mode, out, addend);
                if (dut.result.value.bits != ref.bits ||
                    dut.result.exception != ref.exception ||
                    dut.quire.value() != ref.quire_value)
                    ++mismatches;
            }
            CHECK(mismatches == 0);
        }
    }
}

TEST_CASE("lane permutation leaves the quire unchanged") {
    util::Rng rng(303);
    for (auto mode : {MacMode::Int4x6, MacMode::Fp4x6, MacMode::Fp8x3}) {
        for (int t = 0; t < 300; ++t) {
            size_t n = (size_t)mac::lane_count(mode);
            std::vector<double> a(n), b(n);
            for (size_t i = 0; i < n; ++i) {
                a[i] = rng.normal(0, 4.0);
                b[i] = rng.normal(0, 4.0);
            }
            auto base = mac::dot_product(a, b, mode, ScalarFormat::Bf16);
            std::vector<size_t> idx(n);
            for (size_t i = 0; i < n; ++i) idx[i] = i;
            for (int s = 0; s < 4; ++s) {
                std::shuffle(idx.begin(), idx.end(),
                             std::mt19937((unsigned)rng.next_u64()));
                std::vector<double> pa(n), pb(n);
                for (size_t i = 0; i < n; ++i) {
                    pa[i] = a[idx[i]];
                    pb[i] = b[idx[i]];
                }
                auto perm = mac::dot_product(pa, pb, mode, ScalarFormat::Bf16);
                CHECK(perm.quire.value() == base.quire.value());
                CHECK(perm.result.value.bits == base.result.value.bits);
            }
        }
    }
}

TEST_CASE("single-lane product sign is the xor of operand signs") {
    util::Rng rng(404);
    for (int t = 0; t < 2000; ++t) {
        double a = rng.normal(0, 4.0), b = rng.normal(0, 4.0);
        std::vector<double> va{a}, vb{b};
        auto dot = mac::dot_product(va, vb, MacMode::Bf16x1, ScalarFormat::Bf16);
        double v = dot.quire.value();
        if (v != 0.0) CHECK(std::signbit(v) == (std::signbit(a) != std::signbit(b)));
    }
}

TEST_CASE("mac_cycles: pipeline model") {
    CHECK(mac::mac_cycles(MacMode::Int4x6, 6) == 5);
    CHECK(mac::mac_cycles(MacMode::Bf16x1, 6) == 10);
    CHECK(mac::mac_cycles(MacMode::Fp8x3, 6) == 6);
    CHECK_THROWS(mac::mac_cycles(MacMode::Fp8x3, 0));
    // lane speedup approaches 6x
    double r = (double)mac::mac_cycles(MacMode::Int4x6, 6000) /
               (double)mac::mac_cycles(MacMode::Bf16x1, 6000);
    CHECK(std::fabs(r - 1.0 / 6.0) < 0.1 / 6.0);
}

TEST_CASE("trace hook emits one record per step") {
    std::ostringstream trace;
    std::vector<double> a{1, 2, 3, 4, 5, 6, 7, 1, 1, 1, 1, 1};
    mac::dot_product(a, a, MacMode::Int4x6, ScalarFormat::Bf16, 0.0, &trace);
    std::string s = trace.str();
    CHECK(std::count(s.begin(), s.end(), '\n') == 2);
    CHECK(s.find("mode=int4x6") != std::string::npos);
    CHECK(s.find("max_exp=") != std::string::npos);
}

TEST_CASE("quire saturation sets the exception flag") {
    // fp8-output quire has a 4-bit exponent window; this product blows past it
    std::vector<double> a{448, 448, 448}, b{448, 448, 448};
    auto dot = mac::dot_product(a, b, MacMode::Fp8x3, ScalarFormat::Fp8);
    CHECK(dot.result.exception);
    CHECK(numerics::decode(dot.result.value) == 448.0); // saturated max finite
    auto ref = verify::reference_dot(a, b, MacMode::Fp8x3, ScalarFormat::Fp8);
    CHECK(dot.result.value.bits == ref.bits);
    CHECK(dot.result.exception == ref.exception);
}

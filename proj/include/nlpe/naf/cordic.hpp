#pragma once
// CORDIC cores of the activation unit. Exponentials run hyperbolic rotation
// mode over a Q24 fixed-point datapath (iteration i repeated at 4 and 13 for
// convergence); division runs linear vectoring with the denominator mantissa
// prescaled into [1,2). Power-of-two scaling around the cores is exact.

#include <cstdint>

#include "nlpe/numerics/formats.hpp"

namespace nlpe::naf {

struct CordicConfig {
    int iterations = 16;                          // >= 8; repeats at {4,13} implied
    numerics::ScalarFormat io = numerics::ScalarFormat::Bf16; // fp8 or bf16
};

// e^x. Range-reduced as x = k*ln2 + r, r in [-ln2/2, ln2/2]; cosh r + sinh r
// from the rotation core, scaled by 2^k. |x| > 89 saturates to bf16 max
// finite and raises *overflow.
double cordic_exp(double x, const CordicConfig& cfg, bool* overflow = nullptr);

// num/den via linear vectoring. den == 0 saturates with *flag set; a zero
// numerator is exact zero.
double cordic_div(double num, double den, const CordicConfig& cfg, bool* flag = nullptr);

} // namespace nlpe::naf

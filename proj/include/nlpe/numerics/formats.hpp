#pragma once
// Scalar number formats of the emulated datapath: INT4/INT8 two's complement,
// FP4 (E2M1 with subnormals, no inf/nan), FP8 (E4M3: saturating, single NaN
// code per sign, no inf), BF16 (standard binary interchange semantics), and
// Ref, a wide real used as the software oracle.

#include <cstdint>
#include <string>

namespace nlpe::numerics {

enum class ScalarFormat : uint8_t {
    Int4 = 0,
    Int8 = 1,
    Fp4  = 2,
    Fp8  = 3,
    Bf16 = 4,
    Ref  = 5,
};

// Storage width in bits. Ref counts as 32: it stands in for the fp32
// deployment baseline in footprint accounting.
unsigned bit_width(ScalarFormat f);

// Largest representable code magnitude used by the block quantizer:
// 7 / 127 / 6.0 / 448.0. Not defined for Bf16 (scale fixed at 1) or Ref.
double max_code_magnitude(ScalarFormat f);

double max_finite(ScalarFormat f);

bool is_float_format(ScalarFormat f);

const char* format_name(ScalarFormat f);
ScalarFormat format_from_name(const std::string& name);

struct EncodedScalar {
    ScalarFormat format;
    uint16_t bits = 0; // right-aligned in the low `bit_width` bits

    friend bool operator==(const EncodedScalar&, const EncodedScalar&) = default;
};

// Total functions between codes and reals.
//
// decode: Int formats give the two's-complement value; FP formats follow the
// field semantics above (exp field 0 is subnormal). Fp8 0x7F/0xFF decode to
// NaN; Bf16 carries +-inf and NaN.
//
// encode: round-to-nearest-even over the representable set. Magnitudes above
// max finite saturate to max finite for Fp4/Fp8 (never producing the NaN
// slot); Bf16 overflows to inf. Sign of zero is preserved.
double decode_bits(uint16_t bits, ScalarFormat f);
uint16_t encode_bits(double v, ScalarFormat f);

inline double decode(EncodedScalar x) { return decode_bits(x.bits, x.format); }
inline EncodedScalar encode(double v, ScalarFormat f) {
    return EncodedScalar{f, encode_bits(v, f)};
}

// Round half to even, exact for the small magnitudes the encoders see.
long long round_nearest_even(double x);

} // namespace nlpe::numerics

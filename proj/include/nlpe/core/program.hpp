#pragma once
// Instruction stream for the engine. Text form is one instruction per line:
//   OPCODE key=value ...
// e.g. "MATMUL a=x b=w1 dst=h mode=bf16x1 out=bf16 buf=scratchpad"

#include <map>
#include <string>
#include <vector>

namespace nlpe::core {

enum class Opcode { Load, Store, Matmul, Naf, Sync };

const char* opcode_name(Opcode op);
Opcode opcode_from_name(const std::string& name);

struct Instruction {
    Opcode op = Opcode::Sync;
    std::map<std::string, std::string> args;

    const std::string& arg(const std::string& key) const;
    std::string arg_or(const std::string& key, const std::string& fallback) const;
};

using Program = std::vector<Instruction>;

std::string format_program(const Program& p);
Program parse_program(const std::string& text);

// Layer shapes the program builder understands.
struct LayerDesc {
    enum class Kind { Attention, Ffn, MoeExpert };
    Kind kind = Kind::Ffn;
    uint32_t seq = 8;
    uint32_t d_model = 64;
    uint32_t n_heads = 4;
    uint32_t d_ffn = 128;
    std::string mode = "bf16x1";
    std::string out = "bf16";
    std::string naf_prec = "bf16";
    std::string name = "layer";
};

// LOAD weights -> MATMUL(s) -> NAF -> ... -> STORE with deterministic
// ordering. Input activations are assumed staged in the input buffer.
Program build_layer_program(const std::vector<LayerDesc>& layers);

} // namespace nlpe::core

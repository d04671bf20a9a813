#include "nlpe/core/program.hpp"

#include <sstream>
#include <stdexcept>

namespace nlpe::core {

const char* opcode_name(Opcode op) {
    switch (op) {
        case Opcode::Load: return "LOAD";
        case Opcode::Store: return "STORE";
        case Opcode::Matmul: return "MATMUL";
        case Opcode::Naf: return "NAF";
        case Opcode::Sync: return "SYNC";
    }
    return "?";
}

Opcode opcode_from_name(const std::string& name) {
    for (auto op : {Opcode::Load, Opcode::Store, Opcode::Matmul, Opcode::Naf, Opcode::Sync})
        if (name == opcode_name(op)) return op;
    throw std::invalid_argument("unknown opcode: " + name);
}

const std::string& Instruction::arg(const std::string& key) const {
    auto it = args.find(key);
    if (it == args.end())
        throw std::invalid_argument(std::string(opcode_name(op)) + ": missing arg " + key);
    return it->second;
}

std::string Instruction::arg_or(const std::string& key, const std::string& fallback) const {
    auto it = args.find(key);
    return it == args.end() ? fallback : it->second;
}

std::string format_program(const Program& p) {
    std::ostringstream os;
    for (const auto& ins : p) {
        os << opcode_name(ins.op);
        for (const auto& [k, v] : ins.args) os << ' ' << k << '=' << v;
        os << '\n';
    }
    return os.str();
}

Program parse_program(const std::string& text) {
    Program p;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string tok;
        ls >> tok;
        if (tok.empty()) continue;
        Instruction ins;
        ins.op = opcode_from_name(tok);
        while (ls >> tok) {
            size_t eq = tok.find('=');
            if (eq == std::string::npos)
                throw std::invalid_argument("bad instruction arg: " + tok);
            ins.args[tok.substr(0, eq)] = tok.substr(eq + 1);
        }
        p.push_back(std::move(ins));
    }
    return p;
}

namespace {

Instruction load(const std::string& tensor, const std::string& buf) {
    return Instruction{Opcode::Load, {{"tensor", tensor}, {"buf", buf}}};
}
Instruction store(const std::string& tensor, const std::string& buf) {
    return Instruction{Opcode::Store, {{"tensor", tensor}, {"buf", buf}}};
}
Instruction matmul(const std::string& a, const std::string& b, const std::string& dst,
                   const LayerDesc& l) {
    return Instruction{Opcode::Matmul,
                       {{"a", a}, {"b", b}, {"dst", dst}, {"mode", l.mode},
                        {"out", l.out}, {"buf", "scratchpad"}}};
}
Instruction naf(const std::string& tensor, const std::string& kind, const LayerDesc& l) {
    return Instruction{Opcode::Naf,
                       {{"tensor", tensor}, {"kind", kind}, {"prec", l.naf_prec}}};
}

void emit_ffn(Program& p, const LayerDesc& l, const std::string& x) {
    const std::string& n = l.name;
    p.push_back(load(n + ".w1", "weight"));
    p.push_back(matmul(x, n + ".w1", n + ".h", l));
    p.push_back(naf(n + ".h", "gelu", l));
    p.push_back(load(n + ".w2", "weight"));
    p.push_back(matmul(n + ".h", n + ".w2", n + ".y", l));
    p.push_back(store(n + ".y", "output"));
}

void emit_attention(Program& p, const LayerDesc& l, const std::string& x) {
    const std::string& n = l.name;
    for (const char* w : {"wq", "wk", "wv"}) {
        p.push_back(load(n + "." + w, "weight"));
        p.push_back(matmul(x, n + "." + w, n + "." + std::string(w).substr(1), l));
    }
    for (uint32_t h = 0; h < l.n_heads; ++h) {
        std::string hs = std::to_string(h);
        p.push_back(matmul(n + ".q.h" + hs, n + ".kT.h" + hs, n + ".s.h" + hs, l));
        p.push_back(naf(n + ".s.h" + hs, "softmax", l));
        p.push_back(matmul(n + ".s.h" + hs, n + ".v.h" + hs, n + ".o.h" + hs, l));
    }
    p.push_back(load(n + ".wo", "weight"));
    p.push_back(matmul(n + ".o", n + ".wo", n + ".y", l));
    p.push_back(store(n + ".y", "output"));
    p.push_back(Instruction{Opcode::Sync, {}});
}

} // namespace

Program build_layer_program(const std::vector<LayerDesc>& layers) {
    Program p;
    for (const auto& l : layers) {
        switch (l.kind) {
            case LayerDesc::Kind::Attention:
                emit_attention(p, l, "x");
                break;
            case LayerDesc::Kind::Ffn:
            case LayerDesc::Kind::MoeExpert:
                emit_ffn(p, l, "x");
                break;
        }
    }
    return p;
}

} // namespace nlpe::core

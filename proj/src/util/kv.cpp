#include "nlpe/util/kv.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace nlpe::util {

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

} // namespace

KvMap parse_kv(const std::string& text) {
    KvMap kv;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config line missing '=': " + line);
        kv[trim(t.substr(0, eq))] = trim(t.substr(eq + 1));
    }
    return kv;
}

KvMap load_kv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open config: " + path);
    std::ostringstream ss;
    ss << is.rdbuf();
    return parse_kv(ss.str());
}

double kv_get(const KvMap& kv, const std::string& key, double fallback) {
    auto it = kv.find(key);
    return it == kv.end() ? fallback : std::stod(it->second);
}

long long kv_get(const KvMap& kv, const std::string& key, long long fallback) {
    auto it = kv.find(key);
    return it == kv.end() ? fallback : std::stoll(it->second);
}

} // namespace nlpe::util

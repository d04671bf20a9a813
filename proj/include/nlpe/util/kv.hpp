#pragma once
// key=value config files: one pair per line, '#' comments, blank lines ignored.

#include <map>
#include <string>

namespace nlpe::util {

using KvMap = std::map<std::string, std::string>;

KvMap parse_kv(const std::string& text);
KvMap load_kv(const std::string& path);

double kv_get(const KvMap& kv, const std::string& key, double fallback);
long long kv_get(const KvMap& kv, const std::string& key, long long fallback);

} // namespace nlpe::util

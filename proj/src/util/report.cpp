#include "nlpe/util/report.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace nlpe::util {

const char* provenance_name(Provenance p) {
    switch (p) {
        case Provenance::Measured: return "measured";
        case Provenance::Modeled: return "modeled";
        case Provenance::Calibrated: return "calibrated";
    }
    return "?";
}

void Report::add(const std::string& name, double value, const std::string& unit,
                 Provenance p) {
    rows.push_back(MetricRow{name, value, unit, p});
}

const MetricRow* Report::find(const std::string& name) const {
    for (const auto& r : rows)
        if (r.name == name) return &r;
    return nullptr;
}

std::string to_json(const Report& r) {
    nlohmann::ordered_json j;
    j["schema_version"] = r.schema_version;
    j["command"] = r.command;
    j["generated_at"] = r.generated_at;
    j["metrics"] = nlohmann::ordered_json::array();
    for (const auto& row : r.rows) {
        nlohmann::ordered_json m;
        m["name"] = row.name;
        m["value"] = row.value;
        m["unit"] = row.unit;
        m["provenance"] = provenance_name(row.provenance);
        j["metrics"].push_back(m);
    }
    return j.dump(2) + "\n";
}

std::string to_csv(const Report& r) {
    std::string out = "name,value,unit,provenance\n";
    char buf[64];
    for (const auto& row : r.rows) {
        std::snprintf(buf, sizeof buf, "%.17g", row.value);
        out += row.name + "," + buf + "," + row.unit + "," +
               provenance_name(row.provenance) + "\n";
    }
    return out;
}

void write_file_atomic(const std::string& path, const std::string& contents) {
    std::string tmp = path + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw std::runtime_error("cannot open for write: " + tmp);
        os << contents;
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw std::runtime_error("rename failed: " + path);
}

std::string timestamp_utc() {
    auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

} // namespace nlpe::util

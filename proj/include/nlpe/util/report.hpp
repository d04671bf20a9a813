#pragma once
// Benchmark report container. Every metric row carries a unit and a
// provenance tag; files are written atomically (temp file + rename).

#include <string>
#include <vector>

namespace nlpe::util {

enum class Provenance { Measured, Modeled, Calibrated };

const char* provenance_name(Provenance p);

struct MetricRow {
    std::string name;
    double value = 0.0;
    std::string unit;
    Provenance provenance = Provenance::Measured;
};

struct Report {
    int schema_version = 1;
    std::string command;
    std::string generated_at; // the one field exempt from byte-determinism
    std::vector<MetricRow> rows;

    void add(const std::string& name, double value, const std::string& unit,
             Provenance p);
    const MetricRow* find(const std::string& name) const;
};

std::string to_json(const Report& r);
std::string to_csv(const Report& r);

// write-then-rename
void write_file_atomic(const std::string& path, const std::string& contents);

std::string timestamp_utc();

} // namespace nlpe::util

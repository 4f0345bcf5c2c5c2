#pragma once

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "jumplab/common.hpp"
#include "jumplab/montecarlo.hpp"

namespace jumplab {

struct CheckRow {
    std::string suite;
    std::string case_label;
    double value = 0.0;
    double bound = 0.0;
    bool pass = false;
};

// 17 significant digits, '.' decimal separator, locale-independent; report
// files are byte-diffable across runs.
inline std::string format_float(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline void write_ratios_csv(const std::string& path, const std::vector<RatioRow>& rows) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidInput("cannot open '" + path + "' for writing");
    out << "p,q,regime_case,family,lhs,lhs_se,rhs,ratio,replicas,seed\n";
    for (const auto& row : rows) {
        out << format_float(row.p) << ',' << format_float(row.q) << ',' << row.regime_case
            << ',' << row.family << ',' << format_float(row.lhs) << ','
            << format_float(row.lhs_se) << ',' << format_float(row.rhs) << ','
            << (row.ratio_defined ? format_float(row.ratio) : std::string("nan")) << ','
            << row.replicas << ',' << row.seed << '\n';
    }
}

inline void write_checks_csv(const std::string& path, const std::vector<CheckRow>& rows) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidInput("cannot open '" + path + "' for writing");
    out << "suite,case,value,bound,pass\n";
    for (const auto& row : rows)
        out << row.suite << ',' << row.case_label << ',' << format_float(row.value) << ','
            << format_float(row.bound) << ',' << (row.pass ? 1 : 0) << '\n';
}

inline void write_manifest(const std::string& path, const nlohmann::json& resolved_config,
                           double wall_time_s) {
    nlohmann::json manifest;
    manifest["tool"] = "jumplab";
    manifest["version"] = kVersion;
    manifest["wall_time_s"] = wall_time_s;
    manifest["config"] = resolved_config;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidInput("cannot open '" + path + "' for writing");
    out << manifest.dump(2) << '\n';
}

}  // namespace jumplab

#pragma once

// Result rows, Wilson confidence intervals, and the CSV result format.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "sfdr/signalcore.hpp"

namespace sfdr {

struct ResultRow {
    double sweep = 0.0;
    std::string metric;
    double value = 0.0;
    double ci_half_width = 0.0;
    std::uint64_t n_trials = 0;

    bool operator==(const ResultRow&) const = default;
};

inline constexpr const char* kResultHeader = "sweep,metric,value,ci_half_width,n_trials";

/// Half-width of the 95% Wilson score interval for `successes` out of `n`.
inline double wilson_half_width(double successes, double n, double z = 1.959963984540054) {
    if (n <= 0.0) return 0.0;
    const double p = successes / n;
    const double z2 = z * z;
    return z / (1.0 + z2 / n) * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
}

inline std::string format_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10e", v);
    return buf;
}

inline std::string format_results(const std::vector<ResultRow>& rows) {
    std::string out = std::string(kResultHeader) + "\n";
    for (const auto& r : rows) {
        require(r.metric.find_first_of(",\n\r\"") == std::string::npos, "format_results: metric name needs quoting");
        out += format_number(r.sweep) + "," + r.metric + "," + format_number(r.value) + "," +
               format_number(r.ci_half_width) + "," + std::to_string(r.n_trials) + "\n";
    }
    return out;
}

inline void write_text(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("cannot open '" + path + "' for writing");
    f << text;
    f.flush();
    if (!f) throw Error("write to '" + path + "' failed");
}

inline void emit_results(const std::vector<ResultRow>& rows, const std::string& path) {
    write_text(path, format_results(rows));
}

namespace detail {
inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

inline double parse_double(const std::string& s) {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    require(used == s.size(), "parse_results: malformed number '" + s + "'");
    return v;
}
}  // namespace detail

inline std::vector<ResultRow> parse_results(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    require(static_cast<bool>(std::getline(in, line)) && line == kResultHeader, "parse_results: missing header");
    std::vector<ResultRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto c = detail::split_csv_line(line);
        require(c.size() == 5, "parse_results: expected 5 columns in '" + line + "'");
        rows.push_back({detail::parse_double(c[0]), c[1], detail::parse_double(c[2]), detail::parse_double(c[3]),
                        std::stoull(c[4])});
    }
    return rows;
}

inline std::string read_text(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open '" + path + "' for reading");
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

inline std::vector<ResultRow> read_results(const std::string& path) { return parse_results(read_text(path)); }

}  // namespace sfdr

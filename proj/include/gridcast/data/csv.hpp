#pragma once

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "gridcast/core/error.hpp"
#include "gridcast/core/types.hpp"

namespace gridcast::data {

inline constexpr std::string_view kSeriesHeader = "timestamp,series_id,level,load_mw,temp_f";
inline constexpr std::string_view kHierarchyHeader = "utility_id,bus_id";

namespace detail {

inline std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (true) {
        std::size_t comma = line.find(',', pos);
        out.push_back(line.substr(pos, comma == std::string_view::npos ? std::string_view::npos
                                                                       : comma - pos));
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
    }
    return out;
}

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

// Empty field parses as missing.
inline std::optional<double> parse_number(std::string_view s) {
    s = trim(s);
    if (s.empty()) return kMissing;
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

inline std::string format_number(double v) {
    if (is_missing(v)) return "";
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

}  // namespace detail

/// Reads the five-column series CSV. Only rows whose level matches `level`
/// are kept when it is given. The result holds one series per id in order
/// of first appearance, on a gapless hourly grid from its first to its last
/// timestamp. Duplicate (series, timestamp) rows keep the first value.
inline std::vector<LoadSeries> ingest_csv(std::istream& in, std::optional<Level> level = {}) {
    struct Raw {
        SeriesId id;
        std::map<std::int64_t, std::pair<double, double>> rows;
    };
    std::vector<Raw> raws;
    std::map<std::string, std::size_t> index;

    std::string line;
    std::size_t row = 0;
    if (!std::getline(in, line)) throw IngestError(0, "empty file");
    if (detail::trim(line) != kSeriesHeader) {
        throw IngestError(1, "expected header '" + std::string(kSeriesHeader) + "'");
    }
    row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (detail::trim(line).empty()) continue;
        auto f = detail::split_fields(line);
        if (f.size() != 5) throw IngestError(row, "expected 5 fields");
        Timestamp ts;
        try {
            ts = parse_timestamp(detail::trim(f[0]));
        } catch (const DataError& e) {
            throw IngestError(row, e.what());
        }
        std::string id(detail::trim(f[1]));
        if (id.empty()) throw IngestError(row, "empty series id");
        Level lv;
        try {
            lv = parse_level(std::string(detail::trim(f[2])));
        } catch (const DataError& e) {
            throw IngestError(row, e.what());
        }
        auto load = detail::parse_number(f[3]);
        if (!load) throw IngestError(row, "non-numeric load '" + std::string(f[3]) + "'");
        auto temp = detail::parse_number(f[4]);
        if (!temp) throw IngestError(row, "non-numeric temperature '" + std::string(f[4]) + "'");
        if (level && lv != *level) continue;

        auto it = index.find(id);
        if (it == index.end()) {
            it = index.emplace(id, raws.size()).first;
            raws.push_back({SeriesId{id, lv}, {}});
        } else if (raws[it->second].id.level != lv) {
            throw IngestError(row, "series '" + id + "' appears with two level tags");
        }
        raws[it->second].rows.try_emplace(ts.hours, *load, *temp);
    }

    std::vector<LoadSeries> out;
    out.reserve(raws.size());
    for (auto& r : raws) {
        LoadSeries s;
        s.series = r.id;
        const std::int64_t first = r.rows.begin()->first;
        const std::int64_t last = r.rows.rbegin()->first;
        s.start = Timestamp{first};
        const auto n = static_cast<std::size_t>(last - first + 1);
        s.load.assign(n, kMissing);
        s.temperature.assign(n, kMissing);
        for (const auto& [h, v] : r.rows) {
            s.load[static_cast<std::size_t>(h - first)] = v.first;
            s.temperature[static_cast<std::size_t>(h - first)] = v.second;
        }
        out.push_back(std::move(s));
    }
    return out;
}

inline std::vector<LoadSeries> ingest_csv(const std::string& path, std::optional<Level> level = {}) {
    std::ifstream in(path);
    if (!in) throw IngestError(0, "cannot open '" + path + "'");
    return ingest_csv(in, level);
}

inline void write_csv(std::ostream& out, const std::vector<LoadSeries>& series) {
    out << kSeriesHeader << '\n';
    for (const auto& s : series) {
        const std::string lv = to_string(s.series.level);
        for (std::size_t i = 0; i < s.size(); ++i) {
            out << format_timestamp(s.at(i)) << ',' << s.series.id << ',' << lv << ','
                << detail::format_number(s.load[i]) << ','
                << detail::format_number(s.temperature[i]) << '\n';
        }
    }
}

inline void write_csv(const std::string& path, const std::vector<LoadSeries>& series) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write '" + path + "'");
    write_csv(out, series);
}

/// Reads `utility_id,bus_id` rows. A third `hourly_shares` column is reserved
/// and ignored. Returns hierarchies without statistics.
inline std::vector<Hierarchy> read_hierarchy(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw IngestError(0, "empty hierarchy file");
    auto header = detail::trim(line);
    if (header != kHierarchyHeader && header != "utility_id,bus_id,hourly_shares") {
        throw IngestError(1, "expected header '" + std::string(kHierarchyHeader) + "'");
    }
    std::vector<Hierarchy> out;
    std::map<std::string, std::size_t> index;
    std::set<std::string> seen_buses;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (detail::trim(line).empty()) continue;
        auto f = detail::split_fields(line);
        if (f.size() < 2 || f.size() > 3) throw IngestError(row, "expected 2 fields");
        std::string u(detail::trim(f[0])), b(detail::trim(f[1]));
        if (u.empty() || b.empty()) throw IngestError(row, "empty id");
        if (!seen_buses.insert(b).second) throw IngestError(row, "bus '" + b + "' listed twice");
        auto it = index.find(u);
        if (it == index.end()) {
            it = index.emplace(u, out.size()).first;
            Hierarchy h;
            h.utility = {u, Level::Utility};
            out.push_back(std::move(h));
        }
        out[it->second].buses.push_back({b, Level::Bus});
    }
    return out;
}

inline std::vector<Hierarchy> read_hierarchy(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IngestError(0, "cannot open '" + path + "'");
    return read_hierarchy(in);
}

inline void write_hierarchy(std::ostream& out, const std::vector<Hierarchy>& hs) {
    out << kHierarchyHeader << '\n';
    for (const auto& h : hs) {
        for (const auto& b : h.buses) out << h.utility.id << ',' << b.id << '\n';
    }
}

inline void write_hierarchy(const std::string& path, const std::vector<Hierarchy>& hs) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write '" + path + "'");
    write_hierarchy(out, hs);
}

}  // namespace gridcast::data

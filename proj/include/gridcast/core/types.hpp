#pragma once

#include <cmath>
#include <compare>
#include <cstddef>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "gridcast/core/error.hpp"
#include "gridcast/core/time.hpp"

namespace gridcast {

enum class Level { Utility, Bus };

inline std::string to_string(Level l) { return l == Level::Utility ? "utility" : "bus"; }

inline Level parse_level(const std::string& s) {
    if (s == "utility") return Level::Utility;
    if (s == "bus") return Level::Bus;
    throw DataError("unknown level tag '" + s + "'");
}

struct SeriesId {
    std::string id;
    Level level = Level::Bus;

    auto operator<=>(const SeriesId&) const = default;
};

inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

inline bool is_missing(double v) { return std::isnan(v); }

/// One hourly series on a gapless grid. Missing observations are NaN.
struct LoadSeries {
    SeriesId series;
    Timestamp start;
    std::vector<double> load;         // MW
    std::vector<double> temperature;  // degF

    std::size_t size() const { return load.size(); }
    Timestamp end() const { return start + static_cast<std::int64_t>(load.size()); }  // exclusive
    Timestamp at(std::size_t i) const { return start + static_cast<std::int64_t>(i); }

    bool contains(Timestamp t) const { return t >= start && t < end(); }
    std::size_t index_of(Timestamp t) const { return static_cast<std::size_t>(t - start); }
};

struct Hierarchy {
    SeriesId utility;
    std::vector<SeriesId> buses;
    std::map<std::string, double> proportions;  // keyed by bus id
    double agg_scale = 1.0;

    bool has_bus(const std::string& id) const {
        for (const auto& b : buses) {
            if (b.id == id) return true;
        }
        return false;
    }
};

struct SplitSpec {
    double train_fraction = 0.8;
};

namespace stats {

inline double mean(const std::vector<double>& v) {
    double s = 0.0;
    std::size_t n = 0;
    for (double x : v) {
        if (!is_missing(x)) {
            s += x;
            ++n;
        }
    }
    return n ? s / static_cast<double>(n) : kMissing;
}

/// Variance with denominator n - ddof, skipping missing values.
inline double variance(const std::vector<double>& v, int ddof = 1) {
    const double m = mean(v);
    double s = 0.0;
    std::size_t n = 0;
    for (double x : v) {
        if (!is_missing(x)) {
            s += (x - m) * (x - m);
            ++n;
        }
    }
    if (n <= static_cast<std::size_t>(ddof)) return 0.0;
    return s / static_cast<double>(n - static_cast<std::size_t>(ddof));
}

}  // namespace stats

}  // namespace gridcast

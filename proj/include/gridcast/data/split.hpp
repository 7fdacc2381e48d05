#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "gridcast/core/error.hpp"
#include "gridcast/core/types.hpp"
#include "gridcast/data/clean.hpp"

namespace gridcast::data {

/// First test hour for a series under `spec`.
inline Timestamp split_boundary(const LoadSeries& s, const SplitSpec& spec) {
    if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0)) {
        throw DataError("train fraction must lie in (0, 1)");
    }
    const std::size_t n = train_hours(s.size(), spec);
    if (n == 0 || n >= s.size()) throw DataError("split boundary outside series range");
    return s.at(n);
}

inline LoadSeries slice(const LoadSeries& s, Timestamp from, Timestamp to) {
    if (from < s.start || to > s.end() || from > to) throw DataError("slice outside series range");
    LoadSeries out;
    out.series = s.series;
    out.start = from;
    const auto a = static_cast<std::ptrdiff_t>(s.index_of(from));
    const auto b = static_cast<std::ptrdiff_t>(s.index_of(to));
    out.load.assign(s.load.begin() + a, s.load.begin() + b);
    out.temperature.assign(s.temperature.begin() + a, s.temperature.begin() + b);
    return out;
}

inline std::pair<LoadSeries, LoadSeries> split_at(const LoadSeries& s, Timestamp boundary) {
    if (boundary <= s.start || boundary >= s.end()) throw DataError("split boundary outside series range");
    return {slice(s, s.start, boundary), slice(s, boundary, s.end())};
}

inline std::pair<LoadSeries, LoadSeries> split(const LoadSeries& s, const SplitSpec& spec) {
    return split_at(s, split_boundary(s, spec));
}

/// Training-window proportions and utility/aggregate scale. The training
/// window is the utility series' train split; buses must cover it.
inline Hierarchy compute_hierarchy_stats(const LoadSeries& utility, const std::vector<LoadSeries>& buses,
                                         const SplitSpec& spec) {
    if (buses.empty()) throw DataError("hierarchy has no buses");
    const Timestamp from = utility.start;
    const Timestamp to = split_boundary(utility, spec);
    const auto n = static_cast<std::size_t>(to - from);

    Hierarchy h;
    h.utility = utility.series;
    std::vector<double> bus_means;
    double agg_mean = 0.0;
    for (const auto& b : buses) {
        if (!b.contains(from) || !b.contains(to - 1)) {
            throw DataError("bus '" + b.series.id + "' does not span the training window");
        }
        double s = 0.0;
        const std::size_t off = b.index_of(from);
        for (std::size_t i = 0; i < n; ++i) s += b.load[off + i];
        bus_means.push_back(s / static_cast<double>(n));
        agg_mean += bus_means.back();
        h.buses.push_back(b.series);
    }
    if (!(agg_mean != 0.0) || !std::isfinite(agg_mean)) {
        throw DataError("aggregate bus load has zero mean over the training window");
    }
    double u = 0.0;
    for (std::size_t i = 0; i < n; ++i) u += utility.load[i];
    u /= static_cast<double>(n);
    for (std::size_t i = 0; i < buses.size(); ++i) {
        h.proportions[buses[i].series.id] = bus_means[i] / agg_mean;
    }
    h.agg_scale = u / agg_mean;
    if (!(h.agg_scale > 0.0)) throw DataError("non-positive utility/aggregate scale");
    return h;
}

}  // namespace gridcast::data

#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "gridcast/core/error.hpp"
#include "gridcast/core/types.hpp"

namespace gridcast::data {

struct CleaningPolicy {
    double outlier_sigma = 3.0;
    std::size_t max_linear_gap = 20;
    std::size_t rolling_window = 168;
    std::size_t rolling_min_values = 24;
};

enum class FillMethod { Observed, Linear, Edge, Rolling, GlobalMean };

struct CleaningReport {
    SeriesId series;
    std::size_t outliers_replaced = 0;
    std::size_t linear_imputed = 0;
    std::size_t edge_imputed = 0;
    std::size_t rolling_imputed = 0;
    std::size_t global_mean_imputed = 0;
    std::size_t temperature_imputed = 0;

    std::size_t load_imputed() const {
        return linear_imputed + edge_imputed + rolling_imputed + global_mean_imputed;
    }
};

struct CleanResult {
    LoadSeries series;
    CleaningReport report;
    std::vector<FillMethod> load_fill;  // per hour
};

namespace detail {

/// Fills NaN runs in place. Short interior runs are interpolated linearly,
/// short edge runs copy the nearest observation, long runs take the trailing
/// rolling mean of already-filled values (or the global mean when too few
/// such values exist). Runs are processed left to right.
inline std::vector<FillMethod> fill_gaps(std::vector<double>& v, const CleaningPolicy& p) {
    const std::size_t n = v.size();
    std::vector<FillMethod> method(n, FillMethod::Observed);
    const double global = stats::mean(v);
    std::size_t i = 0;
    while (i < n) {
        if (!is_missing(v[i])) {
            ++i;
            continue;
        }
        std::size_t a = i;
        while (i < n && is_missing(v[i])) ++i;
        const std::size_t b = i;  // run is [a, b)
        const std::size_t len = b - a;
        if (len <= p.max_linear_gap && a > 0 && b < n) {
            const double lo = v[a - 1], hi = v[b];
            const double span = static_cast<double>(len + 1);
            for (std::size_t k = a; k < b; ++k) {
                v[k] = lo + (hi - lo) * static_cast<double>(k - a + 1) / span;
                method[k] = FillMethod::Linear;
            }
        } else if (len <= p.max_linear_gap) {
            const double nearest = a > 0 ? v[a - 1] : v[b];
            for (std::size_t k = a; k < b; ++k) {
                v[k] = nearest;
                method[k] = FillMethod::Edge;
            }
        } else {
            for (std::size_t k = a; k < b; ++k) {
                const std::size_t from = k >= p.rolling_window ? k - p.rolling_window : 0;
                double s = 0.0;
                std::size_t c = 0;
                for (std::size_t j = from; j < k; ++j) {
                    if (!is_missing(v[j])) {
                        s += v[j];
                        ++c;
                    }
                }
                if (c >= p.rolling_min_values) {
                    v[k] = s / static_cast<double>(c);
                    method[k] = FillMethod::Rolling;
                } else {
                    v[k] = global;
                    method[k] = FillMethod::GlobalMean;
                }
            }
        }
    }
    return method;
}

}  // namespace detail

/// Single-pass outlier replacement followed by gap filling. The outlier
/// bound uses the population mean and standard deviation of the raw
/// non-missing load values.
inline CleanResult clean_series(const LoadSeries& s, const CleaningPolicy& policy = {}) {
    std::size_t observed = 0;
    for (double x : s.load) observed += !is_missing(x);
    if (observed == 0) throw DataError("series '" + s.series.id + "' has no observed load");
    if (observed < 2) throw DataError("series '" + s.series.id + "' needs at least 2 observations");
    if (s.temperature.size() != s.load.size()) {
        throw DataError("series '" + s.series.id + "' load/temperature length mismatch");
    }

    CleanResult r;
    r.series = s;
    r.report.series = s.series;
    auto& load = r.series.load;

    const double m = stats::mean(load);
    const double sd = std::sqrt(stats::variance(load, 0));
    if (sd > 0.0) {
        const double bound = policy.outlier_sigma * sd;
        for (double& x : load) {
            if (!is_missing(x) && std::abs(x - m) > bound) {
                x = kMissing;
                ++r.report.outliers_replaced;
            }
        }
    }
    r.load_fill = detail::fill_gaps(load, policy);
    for (auto f : r.load_fill) {
        switch (f) {
            case FillMethod::Linear: ++r.report.linear_imputed; break;
            case FillMethod::Edge: ++r.report.edge_imputed; break;
            case FillMethod::Rolling: ++r.report.rolling_imputed; break;
            case FillMethod::GlobalMean: ++r.report.global_mean_imputed; break;
            case FillMethod::Observed: break;
        }
    }

    auto& temp = r.series.temperature;
    std::size_t temp_observed = 0;
    for (double x : temp) temp_observed += !is_missing(x);
    if (temp_observed == 0) throw DataError("series '" + s.series.id + "' has no temperature");
    for (auto f : detail::fill_gaps(temp, policy)) {
        r.report.temperature_imputed += f != FillMethod::Observed;
    }
    return r;
}

struct ExclusionPolicy {
    std::size_t min_train_hours = 8760;
    double max_missing_ratio = 0.20;
    std::size_t tail_hours = 15 * 24;
};

struct DroppedSeries {
    SeriesId series;
    std::vector<std::string> reasons;  // "constant", "missing_ratio", "short_history", "missing_tail"
};

struct ExclusionResult {
    std::vector<LoadSeries> kept;
    std::vector<DroppedSeries> dropped;
};

inline std::size_t train_hours(std::size_t n, const SplitSpec& split) {
    return static_cast<std::size_t>(std::floor(split.train_fraction * static_cast<double>(n) + 1e-9));
}

/// Applies the usability rules to raw (pre-cleaning) series.
inline ExclusionResult exclude_unusable(const std::vector<LoadSeries>& series, const SplitSpec& split,
                                        const ExclusionPolicy& policy = {}) {
    ExclusionResult out;
    for (const auto& s : series) {
        std::vector<std::string> reasons;
        const std::size_t n = s.size();
        std::size_t missing = 0;
        for (double x : s.load) missing += is_missing(x);
        const bool has_values = missing < n;
        if (!has_values || stats::variance(s.load, 0) == 0.0) reasons.emplace_back("constant");
        if (n == 0 || static_cast<double>(missing) / static_cast<double>(n) > policy.max_missing_ratio) {
            reasons.emplace_back("missing_ratio");
        }
        const std::size_t ntrain = train_hours(n, split);
        std::size_t train_observed = 0;
        for (std::size_t i = 0; i < ntrain; ++i) train_observed += !is_missing(s.load[i]);
        if (train_observed < policy.min_train_hours) reasons.emplace_back("short_history");
        bool tail_missing = true;
        const std::size_t tail_from = ntrain > policy.tail_hours ? ntrain - policy.tail_hours : 0;
        for (std::size_t i = tail_from; i < ntrain; ++i) {
            if (!is_missing(s.load[i])) {
                tail_missing = false;
                break;
            }
        }
        if (tail_missing) reasons.emplace_back("missing_tail");

        if (reasons.empty()) {
            out.kept.push_back(s);
        } else {
            out.dropped.push_back({s.series, std::move(reasons)});
        }
    }
    return out;
}

}  // namespace gridcast::data

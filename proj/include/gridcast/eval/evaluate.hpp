#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "gridcast/core/error.hpp"
#include "gridcast/core/forecast.hpp"
#include "gridcast/core/types.hpp"
#include "gridcast/eval/metrics.hpp"

namespace gridcast::eval {

inline constexpr int kOriginHour = 14;

struct EvalOrigin {
    Timestamp origin;
    std::size_t first_step = 10;  // target-day 00:00
    std::size_t last_step = 33;   // target-day 23:00
};

/// One origin per compute day at 14:00 whose whole target day lies in [from, to).
inline std::vector<EvalOrigin> select_eval_origins(Timestamp from, Timestamp to) {
    std::vector<EvalOrigin> out;
    const int h = hour_of_day(from);
    Timestamp o = from + ((kOriginHour - h + 24) % 24);
    for (; o + 34 <= to; o = o + 24) out.push_back({o, 10, 33});
    return out;
}

/// True when hour `t` falls on the calendar day after the origin's day.
inline bool on_target_day(Timestamp origin, Timestamp t) {
    return to_sys_days(t) == to_sys_days(origin) + std::chrono::days{1};
}

struct SeriesMetrics {
    SeriesId series;
    Metrics metrics;
    double mean_load = 0.0;
};

struct Distribution {
    double min = 0.0, q1 = 0.0, median = 0.0, q3 = 0.0, max = 0.0, mean = 0.0;
};

/// Linear-interpolation quantile of an unsorted sample.
inline double sample_quantile(std::vector<double> v, double q) {
    if (v.empty()) throw ValidationError("quantile of empty sample");
    std::sort(v.begin(), v.end());
    const double pos = q * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

inline Distribution distribution_of(const std::vector<double>& v) {
    Distribution d;
    d.min = *std::min_element(v.begin(), v.end());
    d.max = *std::max_element(v.begin(), v.end());
    d.q1 = sample_quantile(v, 0.25);
    d.median = sample_quantile(v, 0.5);
    d.q3 = sample_quantile(v, 0.75);
    double s = 0.0;
    for (double x : v) s += x;
    d.mean = s / static_cast<double>(v.size());
    return d;
}

inline const std::array<std::string, 5>& metric_names() {
    static const std::array<std::string, 5> n = {"rmse", "mae", "mape", "mase", "msse"};
    return n;
}

inline std::optional<double> metric_value(const Metrics& m, const std::string& name) {
    if (name == "rmse") return m.rmse;
    if (name == "mae") return m.mae;
    if (name == "mape") return m.mape;
    if (name == "mase") return m.mase;
    if (name == "msse") return m.msse;
    throw ValidationError("unknown metric " + name);
}

struct MetricsReport {
    std::string model;
    Level level = Level::Utility;
    bool load_weighted = false;
    std::vector<SeriesMetrics> rows;
    Metrics aggregate;
    std::map<std::string, Distribution> distribution;  // only metrics defined for every series
};

struct EvalOptions {
    bool load_weighted = false;
    std::optional<bool> include_mape;  // default: never at bus level
};

namespace detail {

struct Pooled {
    std::vector<double> actual, predicted, naive;
};

inline void pool_bundle(const ForecastBundle& fb, const LoadSeries& truth, Pooled& out) {
    const auto& med = fb.median();
    for (std::size_t i = 0; i < med.size(); ++i) {
        const Timestamp t = fb.hour(i);
        if (!on_target_day(fb.origin, t)) continue;
        if (!truth.contains(t) || !truth.contains(t - 48)) {
            throw ValidationError("no actual for " + fb.series.id + " at " + format_timestamp(t));
        }
        const double y = truth.load[truth.index_of(t)], b = truth.load[truth.index_of(t - 48)];
        if (is_missing(y) || is_missing(b)) {
            throw ValidationError("missing actual for " + fb.series.id + " at " + format_timestamp(t));
        }
        out.actual.push_back(y);
        out.predicted.push_back(med[i]);
        out.naive.push_back(b);
    }
}

}  // namespace detail

/// Per-series metrics over target-day hours pooled across origins, their
/// across-series mean and distribution. `actuals` is keyed by series id and
/// is the ground truth (utility series or aggregated buses).
inline MetricsReport evaluate_run(const std::vector<ForecastBundle>& forecasts,
                                  const std::map<std::string, LoadSeries>& actuals, Level level,
                                  const EvalOptions& opts = {}) {
    if (forecasts.empty()) throw ValidationError("no forecasts to evaluate");
    std::map<std::string, detail::Pooled> pooled;
    std::map<std::string, SeriesId> ids;
    std::vector<std::string> order;
    for (const auto& fb : forecasts) {
        auto it = actuals.find(fb.series.id);
        if (it == actuals.end()) throw ValidationError("no actuals for series " + fb.series.id);
        if (!pooled.count(fb.series.id)) order.push_back(fb.series.id);
        ids[fb.series.id] = fb.series;
        detail::pool_bundle(fb, it->second, pooled[fb.series.id]);
    }
    const bool mape = opts.include_mape.value_or(level == Level::Utility);

    MetricsReport rep;
    rep.model = forecasts.front().model;
    rep.level = level;
    rep.load_weighted = opts.load_weighted;
    std::sort(order.begin(), order.end());
    for (const auto& id : order) {
        const auto& p = pooled[id];
        if (p.actual.empty()) throw ValidationError("no target-day hours for series " + id);
        SeriesMetrics row;
        row.series = ids[id];
        row.metrics = compute_metrics(p.actual, p.predicted, p.naive);
        if (!mape) row.metrics.mape.reset();
        double s = 0.0;
        for (double y : p.actual) s += y;
        row.mean_load = s / static_cast<double>(p.actual.size());
        rep.rows.push_back(row);
    }

    double wsum = 0.0;
    std::vector<double> w;
    for (const auto& r : rep.rows) {
        w.push_back(opts.load_weighted ? r.mean_load : 1.0);
        wsum += w.back();
    }
    if (!(wsum > 0.0)) throw ValidationError("aggregation weights sum to zero");
    for (const auto& name : metric_names()) {
        std::vector<double> vals;
        double acc = 0.0;
        for (std::size_t i = 0; i < rep.rows.size(); ++i) {
            const auto v = metric_value(rep.rows[i].metrics, name);
            if (!v) break;
            vals.push_back(*v);
            acc += w[i] * *v;
        }
        if (vals.size() != rep.rows.size()) continue;
        const double mean = acc / wsum;
        if (name == "rmse") rep.aggregate.rmse = mean;
        if (name == "mae") rep.aggregate.mae = mean;
        if (name == "mape") rep.aggregate.mape = mean;
        if (name == "mase") rep.aggregate.mase = mean;
        if (name == "msse") rep.aggregate.msse = mean;
        rep.distribution[name] = distribution_of(vals);
    }
    std::size_t hours = 0;
    for (const auto& r : rep.rows) hours += r.metrics.n_hours;
    rep.aggregate.n_hours = hours;
    return rep;
}

/// Empirical coverage of the [lo, hi] quantile band over target-day hours.
inline double interval_coverage(const std::vector<ForecastBundle>& forecasts,
                                const std::map<std::string, LoadSeries>& actuals, double lo = 0.01,
                                double hi = 0.99) {
    std::size_t in = 0, total = 0;
    for (const auto& fb : forecasts) {
        const auto& truth = actuals.at(fb.series.id);
        const auto& lower = fb.values[fb.quantile_index(lo)];
        const auto& upper = fb.values[fb.quantile_index(hi)];
        for (std::size_t i = 0; i < fb.length(); ++i) {
            const Timestamp t = fb.hour(i);
            if (!on_target_day(fb.origin, t)) continue;
            if (!truth.contains(t)) throw ValidationError("no actual at " + format_timestamp(t));
            const double y = truth.load[truth.index_of(t)];
            ++total;
            if (y >= lower[i] && y <= upper[i]) ++in;
        }
    }
    return total == 0 ? 0.0 : static_cast<double>(in) / static_cast<double>(total);
}

/// Sum of bus series over their common grid, labelled as the utility.
inline LoadSeries aggregate_buses(const std::vector<LoadSeries>& buses, const SeriesId& utility) {
    if (buses.empty()) throw ValidationError("no buses to aggregate");
    LoadSeries out;
    out.series = utility;
    out.start = buses.front().start;
    Timestamp end = buses.front().end();
    for (const auto& b : buses) {
        out.start = std::max(out.start, b.start);
        end = std::min(end, b.end());
    }
    if (end <= out.start) throw ValidationError("buses share no common hours");
    const auto n = static_cast<std::size_t>(end - out.start);
    out.load.assign(n, 0.0);
    out.temperature.assign(n, 0.0);
    for (const auto& b : buses) {
        const std::size_t off = b.index_of(out.start);
        for (std::size_t i = 0; i < n; ++i) {
            out.load[i] += b.load[off + i];
            out.temperature[i] += b.temperature[off + i] / static_cast<double>(buses.size());
        }
    }
    return out;
}

/// Distribution table with columns metric,model,min,q1,median,q3,max,mean.
inline void write_distribution_csv(std::ostream& os, const std::vector<MetricsReport>& reports, bool header = true) {
    if (header) os << "metric,model,min,q1,median,q3,max,mean\n";
    for (const auto& name : metric_names()) {
        for (const auto& r : reports) {
            auto it = r.distribution.find(name);
            if (it == r.distribution.end()) continue;
            const auto& d = it->second;
            os << name << ',' << r.model << ',' << d.min << ',' << d.q1 << ',' << d.median << ',' << d.q3 << ','
               << d.max << ',' << d.mean << '\n';
        }
    }
}

}  // namespace gridcast::eval

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "gridcast/core/error.hpp"
#include "gridcast/core/forecast.hpp"
#include "gridcast/core/types.hpp"

namespace gridcast::baselines {

struct KnnConfig {
    std::size_t k = 3;
};

/// Steps from a forecast origin to 00:00 of the following day.
inline std::size_t steps_to_next_day(Timestamp origin) { return static_cast<std::size_t>(24 - hour_of_day(origin)); }

/// Analog-day forecaster. A day is described by its 24 hourly temperatures
/// and the 24 loads ending at the origin hour of the previous day. Candidates
/// are the complete days of `train` whose description lies inside `train`;
/// the forecast is the unweighted mean of the k nearest candidates' load
/// profiles, with each feature standardized by candidate statistics.
inline ForecastBundle knn_forecast(const LoadSeries& train, const LoadSeries& history, Timestamp origin,
                                   std::span<const double> target_day_temps, const KnnConfig& cfg = {}) {
    if (cfg.k < 1) throw ModelError("kNN needs k >= 1");
    if (target_day_temps.size() != 24) throw ModelError("kNN needs 24 target-day temperatures");
    const std::size_t lead = steps_to_next_day(origin);  // origin -> target-day midnight
    const auto lead_h = static_cast<std::int64_t>(lead);

    auto describe = [&](const LoadSeries& s, Timestamp midnight, std::span<const double> temps,
                        std::vector<double>& out) {
        out.clear();
        for (std::size_t h = 0; h < 24; ++h) out.push_back(temps[h]);
        const Timestamp last = midnight - lead_h;  // origin-hour of previous day
        for (std::int64_t i = 23; i >= 0; --i) out.push_back(s.load[s.index_of(last - i)]);
    };

    std::vector<std::vector<double>> feats, profiles;
    std::vector<double> f;
    const Timestamp first_mid = train.start + ((24 - hour_of_day(train.start)) % 24);
    for (Timestamp mid = first_mid; mid + 24 <= train.end(); mid = mid + 24) {
        const Timestamp last = mid - lead_h;
        if (last - 23 < train.start) continue;
        const std::size_t a = train.index_of(mid);
        std::span<const double> temps(train.temperature.data() + a, 24);
        describe(train, mid, temps, f);
        feats.push_back(f);
        profiles.emplace_back(train.load.begin() + static_cast<std::ptrdiff_t>(a),
                              train.load.begin() + static_cast<std::ptrdiff_t>(a + 24));
    }
    if (feats.size() < cfg.k) throw ModelError("fewer kNN candidate days than k");

    const std::size_t dim = 48;
    std::vector<double> mean(dim, 0.0), sd(dim, 0.0);
    for (const auto& v : feats) {
        for (std::size_t j = 0; j < dim; ++j) mean[j] += v[j];
    }
    for (double& m : mean) m /= static_cast<double>(feats.size());
    for (const auto& v : feats) {
        for (std::size_t j = 0; j < dim; ++j) sd[j] += (v[j] - mean[j]) * (v[j] - mean[j]);
    }
    for (double& s : sd) s = std::sqrt(s / static_cast<double>(feats.size()));

    const Timestamp query_mid = origin + lead_h;
    if (!history.contains(origin - 23) || !history.contains(origin)) {
        throw ModelError("kNN needs the 24 loads ending at the origin");
    }
    std::vector<double> query;
    describe(history, query_mid, target_day_temps, query);

    auto z = [&](double x, std::size_t j) { return sd[j] > 0.0 ? (x - mean[j]) / sd[j] : 0.0; };
    std::vector<std::pair<double, std::size_t>> dist;
    for (std::size_t c = 0; c < feats.size(); ++c) {
        double d = 0.0;
        for (std::size_t j = 0; j < dim; ++j) {
            const double e = z(feats[c][j], j) - z(query[j], j);
            d += e * e;
        }
        dist.emplace_back(std::sqrt(d), c);
    }
    std::stable_sort(dist.begin(), dist.end(), [](const auto& a, const auto& b) { return a.first < b.first; });

    ForecastBundle fb;
    fb.series = history.series;
    fb.origin = origin;
    fb.model = "knn";
    fb.step_offset = lead;
    fb.quantiles = {0.5};
    fb.values.assign(1, std::vector<double>(24, 0.0));
    for (std::size_t n = 0; n < cfg.k; ++n) {
        const auto& prof = profiles[dist[n].second];
        for (std::size_t h = 0; h < 24; ++h) fb.values[0][h] += prof[h];
    }
    for (double& v : fb.values[0]) v /= static_cast<double>(cfg.k);
    return fb;
}

}  // namespace gridcast::baselines

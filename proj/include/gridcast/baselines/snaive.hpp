#pragma once

#include <cstddef>

#include "gridcast/core/error.hpp"
#include "gridcast/core/forecast.hpp"
#include "gridcast/core/types.hpp"

namespace gridcast::baselines {

inline constexpr std::int64_t kNaiveLag = 48;

/// Seasonal naive: the forecast for hour t is the observation at t - 48h.
inline ForecastBundle snaive_forecast(const LoadSeries& history, Timestamp origin, std::size_t horizon = 33) {
    if (horizon > static_cast<std::size_t>(kNaiveLag)) throw ModelError("sNaive horizon exceeds the 48h lag");
    if (!history.contains(origin - (kNaiveLag - 1)) || !history.contains(origin)) {
        throw ModelError("sNaive needs 48 hours of history before the origin");
    }
    ForecastBundle fb;
    fb.series = history.series;
    fb.origin = origin;
    fb.model = "snaive";
    fb.quantiles = {0.5};
    fb.values.assign(1, std::vector<double>(horizon));
    for (std::size_t h = 1; h <= horizon; ++h) {
        const Timestamp src = origin + static_cast<std::int64_t>(h) - kNaiveLag;
        const double v = history.load[history.index_of(src)];
        if (is_missing(v)) throw ModelError("missing observation in sNaive source window");
        fb.values[0][h - 1] = v;
    }
    return fb;
}

}  // namespace gridcast::baselines

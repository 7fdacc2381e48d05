#pragma once

#include <cstddef>
#include <vector>

#include "gridcast/core/error.hpp"
#include "gridcast/core/types.hpp"

namespace gridcast::features {

struct Decomposition {
    std::vector<double> trend;
    std::vector<double> seasonal;
    std::vector<double> remainder;
    std::vector<double> profile;  // zero-mean seasonal profile, indexed by phase
};

/// Classical additive decomposition. The trend is a centered moving average
/// over 2*period+1 points with ends held at the nearest computed value; the
/// seasonal profile is the per-phase mean of the detrended values, centered
/// to zero mean. Phase is `(phase0 + i) mod period`.
inline Decomposition decompose(const std::vector<double>& x, std::size_t period = 24, std::size_t phase0 = 0) {
    const std::size_t n = x.size();
    if (period == 0 || n < 3 * period) throw DataError("series too short to decompose");
    Decomposition d;
    d.trend.assign(n, 0.0);
    const std::size_t half = period;
    const double w = static_cast<double>(2 * half + 1);
    for (std::size_t i = half; i + half < n; ++i) {
        double s = 0.0;
        for (std::size_t j = i - half; j <= i + half; ++j) s += x[j];
        d.trend[i] = s / w;
    }
    for (std::size_t i = 0; i < half; ++i) d.trend[i] = d.trend[half];
    for (std::size_t i = n - half; i < n; ++i) d.trend[i] = d.trend[n - half - 1];

    d.profile.assign(period, 0.0);
    std::vector<std::size_t> count(period, 0);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t k = (phase0 + i) % period;
        d.profile[k] += x[i] - d.trend[i];
        ++count[k];
    }
    double centre = 0.0;
    for (std::size_t k = 0; k < period; ++k) {
        d.profile[k] /= static_cast<double>(count[k]);
        centre += d.profile[k];
    }
    centre /= static_cast<double>(period);
    for (double& p : d.profile) p -= centre;

    d.seasonal.resize(n);
    d.remainder.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        d.seasonal[i] = d.profile[(phase0 + i) % period];
        d.remainder[i] = x[i] - d.trend[i] - d.seasonal[i];
    }
    return d;
}

inline Decomposition decompose(const LoadSeries& s, std::size_t period = 24) {
    const auto phase0 = static_cast<std::size_t>(((s.start.hours % static_cast<std::int64_t>(period)) +
                                                  static_cast<std::int64_t>(period)) %
                                                 static_cast<std::int64_t>(period));
    return decompose(s.load, period, phase0);
}

}  // namespace gridcast::features

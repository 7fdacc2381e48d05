#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>

#include "gridcast/core/error.hpp"

namespace gridcast::eval {

/// Error metrics over one set of hours. MAPE is absent when any actual is 0;
/// MASE and MSSE are absent when the naive error sums vanish.
struct Metrics {
    double rmse = 0.0;
    double mae = 0.0;
    std::optional<double> mape;
    std::optional<double> mase;
    std::optional<double> msse;
    std::size_t n_hours = 0;
};

/// `naive` holds y[t-48] aligned with `actual` and `predicted`.
inline Metrics compute_metrics(std::span<const double> actual, std::span<const double> predicted,
                               std::span<const double> naive) {
    const std::size_t n = actual.size();
    if (n == 0) throw ValidationError("metrics need at least one hour");
    if (predicted.size() != n || naive.size() != n) throw ValidationError("metric inputs differ in length");
    double sae = 0.0, sse = 0.0, sape = 0.0, nae = 0.0, nse = 0.0;
    bool has_zero = false;
    for (std::size_t t = 0; t < n; ++t) {
        const double e = actual[t] - predicted[t];
        const double b = actual[t] - naive[t];
        sae += std::abs(e);
        sse += e * e;
        nae += std::abs(b);
        nse += b * b;
        if (actual[t] == 0.0) {
            has_zero = true;
        } else {
            sape += std::abs(e / actual[t]);
        }
    }
    const double dn = static_cast<double>(n);
    Metrics m;
    m.n_hours = n;
    m.rmse = std::sqrt(sse / dn);
    m.mae = sae / dn;
    if (!has_zero) m.mape = 100.0 * sape / dn;
    if (nae > 0.0) m.mase = sae / nae;
    if (nse > 0.0) m.msse = sse / nse;
    return m;
}

/// Fraction of hours whose actual lies in [lower, upper], bounds inclusive.
inline double coverage(std::span<const double> actual, std::span<const double> lower, std::span<const double> upper) {
    if (actual.size() != lower.size() || actual.size() != upper.size()) {
        throw ValidationError("coverage inputs differ in length");
    }
    if (actual.empty()) return 0.0;
    std::size_t in = 0;
    for (std::size_t t = 0; t < actual.size(); ++t) {
        if (actual[t] >= lower[t] && actual[t] <= upper[t]) ++in;
    }
    return static_cast<double>(in) / static_cast<double>(actual.size());
}

}  // namespace gridcast::eval

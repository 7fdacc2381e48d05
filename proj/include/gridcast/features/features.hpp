#pragma once

#include <fftw3.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <mutex>
#include <string>
#include <tuple>
#include <vector>

#include "gridcast/core/error.hpp"
#include "gridcast/core/types.hpp"
#include "gridcast/features/decompose.hpp"

namespace gridcast::features {

inline constexpr std::size_t kFeatureCount = 12;

struct FeatureVector {
    double trend_strength = 0.0;
    double spike = 0.0;
    double linearity = 0.0;
    double curvature = 0.0;
    double stability = 0.0;
    double lumpiness = 0.0;
    double seasonal_strength = 0.0;
    double trough = 0.0;
    double entropy = 0.0;
    double acf1 = 0.0;
    double acf10 = 0.0;
    double peak = 0.0;

    std::array<double, kFeatureCount> to_array() const {
        return {trend_strength, spike,             linearity, curvature, stability, lumpiness,
                seasonal_strength, trough, entropy, acf1, acf10, peak};
    }

    static const std::array<const char*, kFeatureCount>& names() {
        static const std::array<const char*, kFeatureCount> n = {
            "trend_strength", "spike", "linearity", "curvature", "stability", "lumpiness",
            "seasonal_strength", "trough", "entropy", "acf1", "acf10", "peak"};
        return n;
    }
};

namespace detail {

inline double var(const std::vector<double>& v) { return stats::variance(v, 1); }

inline double sum_var_ratio(const std::vector<double>& part, const std::vector<double>& rem) {
    std::vector<double> s(part.size());
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = part[i] + rem[i];
    const double denom = var(s);
    if (!(denom > 0.0)) return 0.0;
    return std::max(0.0, 1.0 - var(rem) / denom);
}

inline double autocorrelation(const std::vector<double>& r, std::size_t lag) {
    const std::size_t n = r.size();
    if (lag >= n) return 0.0;
    double m = 0.0;
    for (double x : r) m += x;
    m /= static_cast<double>(n);
    double den = 0.0, num = 0.0;
    for (std::size_t i = 0; i < n; ++i) den += (r[i] - m) * (r[i] - m);
    for (std::size_t i = 0; i + lag < n; ++i) num += (r[i] - m) * (r[i + lag] - m);
    return den > 0.0 ? num / den : 0.0;
}

// Variance (n-1) of the n leave-one-out sample variances.
inline double leave_one_out_variance_spread(const std::vector<double>& r) {
    const std::size_t n = r.size();
    if (n < 3) return 0.0;
    double s = 0.0, q = 0.0;
    for (double x : r) {
        s += x;
        q += x * x;
    }
    std::vector<double> loo(n);
    const double m = static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        const double si = s - r[i], qi = q - r[i] * r[i];
        loo[i] = std::max(0.0, (qi - si * si / m) / (m - 1.0));
    }
    return var(loo);
}

// Coefficients of the trend on orthonormal degree-1 and degree-2 polynomials
// in the time index.
inline std::pair<double, double> orthogonal_quadratic(const std::vector<double>& y) {
    const std::size_t n = y.size();
    std::vector<double> p0(n, 1.0 / std::sqrt(static_cast<double>(n))), p1(n), p2(n);
    auto dot = [&](const std::vector<double>& a, const std::vector<double>& b) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
        return s;
    };
    auto orthonormalize = [&](std::vector<double>& v, std::initializer_list<const std::vector<double>*> basis) {
        for (const auto* b : basis) {
            const double c = dot(v, *b);
            for (std::size_t i = 0; i < n; ++i) v[i] -= c * (*b)[i];
        }
        const double norm = std::sqrt(dot(v, v));
        for (double& x : v) x /= norm;
    };
    const double tm = (static_cast<double>(n) + 1.0) / 2.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i + 1) - tm;
        p1[i] = t;
        p2[i] = t * t;
    }
    orthonormalize(p1, {&p0});
    orthonormalize(p2, {&p0, &p1});
    return {dot(p1, y), dot(p2, y)};
}

// Normalized Shannon entropy of the periodogram over frequencies 1..n/2.
inline double spectral_entropy(const std::vector<double>& z) {
    const int n = static_cast<int>(z.size());
    const int bins = n / 2 + 1;
    std::vector<double> in(z);
    // The FFTW planner is not re-entrant.
    static std::mutex planner;
    fftw_complex* out = fftw_alloc_complex(static_cast<std::size_t>(bins));
    fftw_plan plan;
    {
        std::lock_guard lock(planner);
        plan = fftw_plan_dft_r2c_1d(n, in.data(), out, FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    std::vector<double> power;
    power.reserve(static_cast<std::size_t>(bins));
    double total = 0.0;
    for (int k = 1; k < bins; ++k) {
        const double p = out[k][0] * out[k][0] + out[k][1] * out[k][1];
        power.push_back(p);
        total += p;
    }
    {
        std::lock_guard lock(planner);
        fftw_destroy_plan(plan);
    }
    fftw_free(out);
    if (power.size() < 2 || !(total > 0.0)) return 0.0;
    double h = 0.0;
    for (double p : power) {
        if (p > 0.0) {
            const double q = p / total;
            h -= q * std::log(q);
        }
    }
    return std::clamp(h / std::log(static_cast<double>(power.size())), 0.0, 1.0);
}

}  // namespace detail

/// Computes the twelve clustering characteristics from a cleaned series.
/// Every feature is computed on the standardized series, so none depends on
/// the series' magnitude.
inline FeatureVector extract_features(const std::vector<double>& x, std::size_t phase0 = 0,
                                      std::size_t period = 24) {
    if (x.size() < 14 * 24) throw DataError("series too short for feature extraction");
    const double sd = std::sqrt(stats::variance(x, 1));
    if (!(sd > 0.0)) throw DataError("zero-variance series has no features");

    const double m = stats::mean(x);
    std::vector<double> z(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) z[i] = (x[i] - m) / sd;

    const Decomposition d = decompose(z, period, phase0);
    FeatureVector f;
    f.trend_strength = detail::sum_var_ratio(d.trend, d.remainder);
    f.seasonal_strength = detail::sum_var_ratio(d.seasonal, d.remainder);
    f.spike = detail::leave_one_out_variance_spread(d.remainder);
    std::tie(f.linearity, f.curvature) = detail::orthogonal_quadratic(d.trend);
    f.acf1 = detail::autocorrelation(d.remainder, 1);
    f.acf10 = 0.0;
    for (std::size_t k = 1; k <= 10; ++k) {
        const double a = detail::autocorrelation(d.remainder, k);
        f.acf10 += a * a;
    }
    const auto peak = std::max_element(d.profile.begin(), d.profile.end());
    const auto trough = std::min_element(d.profile.begin(), d.profile.end());
    f.peak = static_cast<double>(peak - d.profile.begin());
    f.trough = static_cast<double>(trough - d.profile.begin());

    std::vector<double> means, vars;
    for (std::size_t a = 0; a + period <= z.size(); a += period) {
        std::vector<double> w(z.begin() + static_cast<std::ptrdiff_t>(a),
                              z.begin() + static_cast<std::ptrdiff_t>(a + period));
        means.push_back(stats::mean(w));
        vars.push_back(detail::var(w));
    }
    f.stability = detail::var(means);
    f.lumpiness = detail::var(vars);
    f.entropy = detail::spectral_entropy(z);
    return f;
}

inline FeatureVector extract_features(const LoadSeries& s) {
    const auto phase0 = static_cast<std::size_t>(((s.start.hours % 24) + 24) % 24);
    return extract_features(s.load, phase0);
}

}  // namespace gridcast::features

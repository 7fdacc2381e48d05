#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "gridcast/core/rng.hpp"
#include "gridcast/features/decompose.hpp"
#include "gridcast/features/features.hpp"

using namespace gridcast;
using features::extract_features;

namespace {

std::vector<double> sinusoid(std::size_t n, double amp = 3.0, double base = 10.0) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = base + amp * std::sin(2.0 * std::numbers::pi * static_cast<double>(i) / 24.0);
    return v;
}

std::vector<double> noise(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> v(n);
    for (auto& x : v) x = rng.normal();
    return v;
}

double var(const std::vector<double>& v) { return stats::variance(v, 1); }

}  // namespace

TEST(Decompose, ReconstructsExactly) {
    auto x = noise(24 * 30, 3);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += 0.01 * static_cast<double>(i);
    const auto d = features::decompose(x, 24, 5);
    for (std::size_t i = 0; i < x.size(); ++i) EXPECT_NEAR(d.trend[i] + d.seasonal[i] + d.remainder[i], x[i], 1e-14 * (1.0 + std::abs(x[i]))) << i;
}

TEST(Decompose, ProfileIsCenteredOnPhase) {
    const auto x = sinusoid(24 * 20);
    const auto d = features::decompose(x, 24, 7);
    double s = 0.0;
    for (double p : d.profile) s += p;
    EXPECT_NEAR(s, 0.0, 1e-12);
    for (std::size_t i = 0; i < x.size(); ++i) EXPECT_EQ(d.seasonal[i], d.profile[(7 + i) % 24]);
}

TEST(Decompose, ConstantSeriesIsDegenerate) {
    const std::vector<double> x(24 * 5, 5.0);
    const auto d = features::decompose(x);
    for (std::size_t i = 0; i < x.size(); ++i) {
        EXPECT_EQ(d.trend[i], 5.0);
        EXPECT_EQ(d.seasonal[i], 0.0);
        EXPECT_EQ(d.remainder[i], 0.0);
    }
    // All-zero profile: the earliest hour wins both extremes.
    EXPECT_EQ(std::max_element(d.profile.begin(), d.profile.end()) - d.profile.begin(), 0);
    EXPECT_EQ(std::min_element(d.profile.begin(), d.profile.end()) - d.profile.begin(), 0);
}

TEST(Decompose, MovingAverageMatchesDirectSum) {
    const auto x = noise(24 * 4, 11);
    const auto d = features::decompose(x);
    for (std::size_t i = 24; i + 24 < x.size(); ++i) {
        double s = 0.0;
        for (std::size_t j = i - 24; j <= i + 24; ++j) s += x[j];
        EXPECT_NEAR(d.trend[i], s / 49.0, 1e-12);
    }
    for (std::size_t i = 0; i < 24; ++i) EXPECT_EQ(d.trend[i], d.trend[24]);
    for (std::size_t i = x.size() - 24; i < x.size(); ++i) EXPECT_EQ(d.trend[i], d.trend[x.size() - 25]);
}

TEST(Decompose, TooShort) { EXPECT_THROW(features::decompose(std::vector<double>(71, 1.0)), DataError); }

TEST(Features, SinusoidIsSeasonal) {
    const auto x = sinusoid(24 * 60);
    const auto d = features::decompose(x);
    // Oracle: the variance ratio computed directly from the components.
    std::vector<double> sr(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) sr[i] = d.seasonal[i] + d.remainder[i];
    const double oracle = std::max(0.0, 1.0 - var(d.remainder) / var(sr));
    const auto f = extract_features(x);
    EXPECT_NEAR(f.seasonal_strength, oracle, 1e-12);
    EXPECT_GE(f.seasonal_strength, 0.99);
    EXPECT_EQ(f.peak, 6.0);
    EXPECT_EQ(f.trough, 18.0);
}

TEST(Features, WhiteNoiseIsNotSeasonal) {
    double worst = 0.0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        worst = std::max(worst, extract_features(noise(2160, seed)).seasonal_strength);
    }
    EXPECT_LT(worst, 0.2);
}

TEST(Features, AlternatingSequenceAutocorrelationClosedForm) {
    for (std::size_t n : {2u, 3u, 10u, 721u}) {
        std::vector<double> x(n);
        for (std::size_t i = 0; i < n; ++i) x[i] = i % 2 ? -1.0 : 1.0;
        const double m = stats::mean(x);
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < n; ++i) den += (x[i] - m) * (x[i] - m);
        for (std::size_t i = 0; i + 1 < n; ++i) num += (x[i] - m) * (x[i + 1] - m);
        EXPECT_NEAR(features::detail::autocorrelation(x, 1), num / den, 1e-12) << n;
        if (n % 2 == 0) {
            EXPECT_NEAR(features::detail::autocorrelation(x, 1), -static_cast<double>(n - 1) / n, 1e-12);
        }
    }
}

TEST(Features, AlternatingRemainderHasNegativeLagOneCorrelation) {
    // A plain +1/-1 alternation has period 2 and is absorbed by the daily
    // profile. Flipping its sign every day leaves it in the remainder.
    std::vector<double> x(24 * 30);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = ((i % 2) ^ ((i / 24) % 2)) ? -1.0 : 1.0;
    EXPECT_LE(extract_features(x).acf1, -0.9);

    std::vector<double> plain(24 * 30);
    for (std::size_t i = 0; i < plain.size(); ++i) plain[i] = i % 2 ? -1.0 : 1.0;
    EXPECT_GE(extract_features(plain).seasonal_strength, 0.99);
}

TEST(Features, PureLine) {
    std::vector<double> x(24 * 30);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = static_cast<double>(i);
    const auto f = extract_features(x);
    EXPECT_GE(f.trend_strength, 0.99);
    EXPECT_NEAR(f.curvature, 0.0, 1e-9 * std::abs(f.linearity));
    EXPECT_GT(f.linearity, 0.0);
}

TEST(Features, OrthogonalCoefficientsMatchLeastSquares) {
    // Oracle: on an exact quadratic in centred time u, the linear
    // coefficient is the slope at the centre times ||u|| and the quadratic
    // one is c times the norm of u^2 with its mean removed.
    const std::size_t n = 200;
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i + 1);
        y[i] = 2.0 + 0.5 * t - 0.01 * t * t;
    }
    const auto [b1, b2] = features::detail::orthogonal_quadratic(y);
    const double tm = (static_cast<double>(n) + 1.0) / 2.0;
    double s2 = 0.0, s2sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i + 1) - tm;
        s2 += t * t;
    }
    const double slope_at_centre = 0.5 - 0.02 * tm;
    EXPECT_NEAR(b1, slope_at_centre * std::sqrt(s2), 1e-8);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i + 1) - tm;
        const double q = t * t - s2 / static_cast<double>(n);
        s2sq += q * q;
    }
    EXPECT_NEAR(b2, -0.01 * std::sqrt(s2sq), 1e-8);
}

TEST(Features, ScaleInvariance) {
    auto x = sinusoid(24 * 40, 4.0, 50.0);
    const auto e = noise(x.size(), 9);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += e[i] + 0.002 * static_cast<double>(i);
    std::vector<double> y(x);
    for (double& v : y) v *= 7.5;
    const auto a = extract_features(x), b = extract_features(y);
    EXPECT_NEAR(a.stability, b.stability, 1e-9);
    EXPECT_NEAR(a.lumpiness, b.lumpiness, 1e-9);
    EXPECT_NEAR(a.entropy, b.entropy, 1e-9);
    EXPECT_NEAR(a.acf1, b.acf1, 1e-9);
    EXPECT_NEAR(a.acf10, b.acf10, 1e-9);
    EXPECT_NEAR(a.trend_strength, b.trend_strength, 1e-9);
    EXPECT_NEAR(a.seasonal_strength, b.seasonal_strength, 1e-9);
    EXPECT_NEAR(a.linearity, b.linearity, 1e-9 * std::abs(a.linearity));
    EXPECT_NEAR(a.curvature, b.curvature, 1e-9 * (1.0 + std::abs(a.curvature)));
    EXPECT_NEAR(a.spike, b.spike, 1e-9 * a.spike);
    EXPECT_EQ(a.peak, b.peak);
    EXPECT_EQ(a.trough, b.trough);
}

TEST(Features, RangesHoldOnRandomSeries) {
    Rng rng(5);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t n = 24 * (14 + rng.below(30));
        auto x = noise(n, 100 + static_cast<std::uint64_t>(trial));
        const double amp = rng.uniform(0.0, 5.0), slope = rng.uniform(-0.05, 0.05);
        for (std::size_t i = 0; i < n; ++i) {
            x[i] += amp * std::sin(2.0 * std::numbers::pi * static_cast<double>(i) / 24.0) + slope * static_cast<double>(i);
        }
        const auto f = extract_features(x, static_cast<std::size_t>(rng.below(24)));
        EXPECT_GE(f.trend_strength, 0.0);
        EXPECT_LE(f.trend_strength, 1.0);
        EXPECT_GE(f.seasonal_strength, 0.0);
        EXPECT_LE(f.seasonal_strength, 1.0);
        EXPECT_GE(f.entropy, 0.0);
        EXPECT_LE(f.entropy, 1.0);
        EXPECT_GE(f.acf1, -1.0);
        EXPECT_LE(f.acf1, 1.0);
        EXPECT_GE(f.acf10, 0.0);
        EXPECT_GE(f.stability, 0.0);
        EXPECT_GE(f.lumpiness, 0.0);
        EXPECT_GE(f.spike, 0.0);
        EXPECT_GE(f.peak, 0.0);
        EXPECT_LE(f.peak, 23.0);
        EXPECT_GE(f.trough, 0.0);
        EXPECT_LE(f.trough, 23.0);
    }
}

TEST(Features, SpikeMatchesDirectLeaveOneOut) {
    const auto r = noise(400, 21);
    std::vector<double> loo;
    for (std::size_t i = 0; i < r.size(); ++i) {
        std::vector<double> rest;
        for (std::size_t j = 0; j < r.size(); ++j) {
            if (j != i) rest.push_back(r[j]);
        }
        loo.push_back(var(rest));
    }
    EXPECT_NEAR(features::detail::leave_one_out_variance_spread(r), var(loo), 1e-12);
}

TEST(Features, EntropyBounds) {
    // A single pure tone concentrates power in one bin; white noise spreads it.
    std::vector<double> z(512);
    for (std::size_t i = 0; i < z.size(); ++i) z[i] = std::cos(2.0 * std::numbers::pi * 8.0 * static_cast<double>(i) / 512.0);
    EXPECT_LT(features::detail::spectral_entropy(z), 0.01);
    EXPECT_GT(features::detail::spectral_entropy(noise(512, 4)), 0.8);
}

TEST(Features, Errors) {
    EXPECT_THROW(extract_features(std::vector<double>(24 * 13, 1.0)), DataError);
    EXPECT_THROW(extract_features(std::vector<double>(24 * 20, 1.0)), DataError);
}

TEST(Features, PhaseFollowsSeriesStart) {
    // The same values starting three hours later shift the profile extremes.
    const auto x = sinusoid(24 * 30);
    LoadSeries s;
    s.start = Timestamp{3};
    s.load = x;
    s.temperature.assign(x.size(), 60.0);
    const auto f = extract_features(s);
    EXPECT_EQ(f.peak, 9.0);
    EXPECT_EQ(f.trough, 21.0);
}

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "gridcast/core/rng.hpp"
#include "gridcast/diagnose/attribution.hpp"
#include "gridcast/diagnose/feature_profile.hpp"
#include "gridcast/reconcile/reconcile.hpp"
#include "support/fixtures.hpp"

using namespace gridcast;
using diagnose::attribute_errors;
using diagnose::high_error_analysis;

namespace {

const Timestamp kStart = make_timestamp(2022, 6, 1);

/// Buses with constant actual loads and forecasts chosen so that the
/// target-day residual of bus i at hour t is resid(i, t).
struct Case {
    Hierarchy h;
    std::map<std::string, LoadSeries> actuals;
    std::vector<ForecastBundle> forecasts;
};

template <typename Resid>
Case make_case(const std::vector<double>& loads, std::size_t days, Resid resid) {
    Case c;
    c.h.utility = {"U1", Level::Utility};
    for (std::size_t i = 0; i < loads.size(); ++i) {
        const std::string id = "B" + std::to_string(i + 1);
        c.h.buses.push_back({id, Level::Bus});
        c.h.proportions[id] = 1.0 / static_cast<double>(loads.size());
        c.actuals[id] = fixtures::make_series(id, Level::Bus, kStart, std::vector<double>(24 * (days + 2), loads[i]));
    }
    std::size_t hour_index = 0;
    for (std::size_t d = 0; d < days; ++d) {
        const Timestamp origin = kStart + static_cast<std::int64_t>(24 * d + 14);
        for (std::size_t i = 0; i < loads.size(); ++i) {
            ForecastBundle fb;
            fb.series = c.h.buses[i];
            fb.origin = origin;
            fb.values.assign(1, std::vector<double>(33, loads[i]));
            for (std::size_t k = 9; k < 33; ++k) fb.values[0][k] = loads[i] - resid(i, hour_index + k - 9);
            c.forecasts.push_back(fb);
        }
        hour_index += 24;
    }
    return c;
}

}  // namespace

TEST(Attribution, PerfectSingleBus) {
    auto c = make_case({50.0}, 2, [](std::size_t, std::size_t) { return 0.0; });
    const auto a = attribute_errors(c.forecasts, c.actuals, c.h, 5);
    ASSERT_EQ(a.rows.size(), 48u);
    for (const auto& r : a.rows) {
        EXPECT_EQ(r.utility_residual, 0.0);
        EXPECT_EQ(r.bus_residuals, (std::vector<double>{0.0}));
        EXPECT_EQ(r.remainder_residual, 0.0);
    }
    EXPECT_EQ(a.rows.front().timestamp, kStart + 24);
    EXPECT_EQ(std::string(diagnose::kResidualConvention), "actual - forecast");
}

TEST(Attribution, ErrorCancellation) {
    auto c = make_case({50.0, 50.0}, 1, [](std::size_t i, std::size_t) { return i == 0 ? 2.0 : -2.0; });
    const auto a = attribute_errors(c.forecasts, c.actuals, c.h, 2);
    for (const auto& r : a.rows) {
        EXPECT_EQ(r.utility_residual, 0.0);
        EXPECT_EQ(std::abs(r.bus_residuals[0]) + std::abs(r.bus_residuals[1]), 4.0);
    }
}

TEST(Attribution, TopOneOfThree) {
    // B2 carries the largest load, so the remainder is B1 + B3.
    auto c = make_case({10.0, 80.0, 30.0}, 1, [](std::size_t i, std::size_t t) {
        return static_cast<double>((i + 1) * 10 + t % 3);
    });
    const auto a = attribute_errors(c.forecasts, c.actuals, c.h, 1);
    ASSERT_EQ(a.top_buses.size(), 1u);
    EXPECT_EQ(a.top_buses[0].id, "B2");
    for (std::size_t r = 0; r < a.rows.size(); ++r) {
        const double extra = static_cast<double>(r % 3);
        EXPECT_DOUBLE_EQ(a.rows[r].bus_residuals[0], 20.0 + extra);
        EXPECT_DOUBLE_EQ(a.rows[r].remainder_residual, (10.0 + extra) + (30.0 + extra));
    }
    EXPECT_NEAR(a.load_share[1], 80.0 / 120.0, 1e-12);
}

TEST(AttributionProperty, RowsAreAdditive) {
    Rng rng(1);
    std::vector<double> loads;
    for (int i = 0; i < 12; ++i) loads.push_back(rng.uniform(5.0, 200.0));
    auto c = make_case(loads, 6, [&](std::size_t, std::size_t) { return rng.normal() * 3.0; });
    const auto a = attribute_errors(c.forecasts, c.actuals, c.h, 5);
    for (const auto& r : a.rows) {
        double s = r.remainder_residual;
        for (double x : r.bus_residuals) s += x;
        EXPECT_NEAR(r.utility_residual, s, 1e-6);
    }
    double share = 0.0;
    for (double s : a.load_share) share += s;
    EXPECT_NEAR(share, 1.0, 1e-12);
}

TEST(Attribution, RejectsNonBottomUpUtility) {
    auto c = make_case({10.0, 20.0}, 2, [](std::size_t, std::size_t) { return 1.0; });
    std::vector<ForecastBundle> util;
    for (std::size_t d = 0; d < 2; ++d) {
        util.push_back(reconcile::bottom_up({c.forecasts[2 * d], c.forecasts[2 * d + 1]}, c.h));
    }
    EXPECT_NO_THROW(attribute_errors(c.forecasts, c.actuals, c.h, 1, util));
    util[1].values[0][12] += 0.1;
    EXPECT_THROW(attribute_errors(c.forecasts, c.actuals, c.h, 1, util), ValidationError);
}

TEST(Attribution, Errors) {
    auto c = make_case({10.0, 20.0}, 2, [](std::size_t, std::size_t) { return 1.0; });
    auto missing = c.forecasts;
    missing.pop_back();
    EXPECT_THROW(attribute_errors(missing, c.actuals, c.h, 1), ValidationError);
    auto stranger = c.forecasts;
    stranger[0].series.id = "B9";
    EXPECT_THROW(attribute_errors(stranger, c.actuals, c.h, 1), NotFound);
    auto no_actuals = c.actuals;
    no_actuals.erase("B1");
    EXPECT_THROW(attribute_errors(c.forecasts, no_actuals, c.h, 1), ValidationError);
}

TEST(HighError, SoleContributor) {
    Rng rng(2);
    auto c = make_case({10.0, 20.0}, 3, [&](std::size_t i, std::size_t) { return i == 0 ? rng.normal() : 0.0; });
    const auto [pos, neg] = high_error_analysis(attribute_errors(c.forecasts, c.actuals, c.h, 2));
    EXPECT_DOUBLE_EQ(pos.buses[0].bias_share, 1.0);
    EXPECT_DOUBLE_EQ(pos.buses[0].mae_share, 1.0);
    EXPECT_DOUBLE_EQ(neg.buses[0].bias_share, 1.0);
    EXPECT_EQ(pos.buses[1].bias_share, 0.0);
    EXPECT_DOUBLE_EQ(pos.buses[0].overall_mae_share, 1.0);
}

TEST(HighError, OpposingBusHasNegativeBias) {
    Rng rng(3);
    std::vector<double> base;
    auto c = make_case({10.0, 20.0}, 3, [&](std::size_t i, std::size_t t) {
        if (base.size() <= t) base.push_back(rng.normal());
        return i == 0 ? 3.0 * base[t] : -base[t];
    });
    const auto [pos, neg] = high_error_analysis(attribute_errors(c.forecasts, c.actuals, c.h, 2));
    EXPECT_LT(pos.buses[1].bias_share, 0.0);
    EXPECT_LT(neg.buses[1].bias_share, 0.0);
    EXPECT_NEAR(pos.buses[0].bias_share, 1.5, 1e-9);
}

TEST(HighError, TwoIdenticalBusesSplitEvenly) {
    Rng rng(4);
    std::vector<double> base;
    auto c = make_case({40.0, 40.0}, 3, [&](std::size_t, std::size_t t) {
        if (base.size() <= t) base.push_back(rng.normal());
        return base[t];
    });
    const auto [pos, neg] = high_error_analysis(attribute_errors(c.forecasts, c.actuals, c.h, 2));
    for (const auto& p : {pos, neg}) {
        for (const auto& b : p.buses) {
            EXPECT_NEAR(b.bias_share, 0.5, 1e-12);
            EXPECT_NEAR(b.mae_share, 0.5, 1e-12);
            EXPECT_NEAR(b.overall_load_share, 0.5, 1e-12);
        }
    }
}

TEST(HighErrorProperty, SelectionSizeDisjointAndBounded) {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        Rng rng(seed);
        const std::size_t days = 1 + rng.below(10);
        std::vector<double> loads;
        for (int i = 0; i < 6; ++i) loads.push_back(rng.uniform(5.0, 50.0));
        auto c = make_case(loads, days, [&](std::size_t, std::size_t) { return rng.normal(); });
        const auto a = attribute_errors(c.forecasts, c.actuals, c.h, 3);
        const auto [pos, neg] = high_error_analysis(a);
        const auto k = static_cast<std::size_t>(std::ceil(0.10 * static_cast<double>(a.rows.size())));
        EXPECT_EQ(pos.selected.size(), k);
        EXPECT_EQ(neg.selected.size(), k);
        std::set<Timestamp> both(pos.selected.begin(), pos.selected.end());
        for (auto t : neg.selected) EXPECT_FALSE(both.count(t));
        double load_share = 0.0;
        for (const auto& b : pos.buses) {
            load_share += b.overall_load_share;
            EXPECT_LE(std::abs(b.bias_share), b.mae_share + 1e-12);
        }
        EXPECT_NEAR(load_share, 1.0, 1e-12);
        // The positive selection holds the k largest utility residuals.
        double min_sel = 1e300;
        for (const auto& r : a.rows) {
            if (both.count(r.timestamp)) min_sel = std::min(min_sel, r.utility_residual);
        }
        std::size_t larger = 0;
        for (const auto& r : a.rows) larger += r.utility_residual > min_sel;
        EXPECT_LT(larger, k);
    }
}

TEST(HighErrorProperty, InvariantToBusOrder) {
    Rng rng(5);
    std::vector<double> loads = {12, 40, 7, 33, 25};
    auto c = make_case(loads, 5, [&](std::size_t, std::size_t) { return rng.normal(); });
    const auto a = high_error_analysis(attribute_errors(c.forecasts, c.actuals, c.h, 2));
    Hierarchy rev = c.h;
    std::reverse(rev.buses.begin(), rev.buses.end());
    auto shuffled = c.forecasts;
    std::reverse(shuffled.begin(), shuffled.end());
    const auto b = high_error_analysis(attribute_errors(shuffled, c.actuals, rev, 2));
    EXPECT_EQ(a.first.selected, b.first.selected);
    EXPECT_EQ(a.second.selected, b.second.selected);
    for (std::size_t i = 0; i < loads.size(); ++i) {
        const auto& x = a.first.buses[i];
        const auto& y = b.first.buses[loads.size() - 1 - i];
        EXPECT_EQ(x.bus, y.bus);
        EXPECT_EQ(x.bias_share, y.bias_share);
        EXPECT_EQ(x.mae_share, y.mae_share);
    }
}

TEST(HighError, Errors) {
    auto few = make_case({10.0}, 1, [](std::size_t, std::size_t) { return 1.0; });
    auto a = attribute_errors(few.forecasts, few.actuals, few.h, 1);
    a.rows.resize(9);
    a.residuals.resize(9);
    EXPECT_THROW(high_error_analysis(a), ValidationError);
    auto zero = make_case({10.0}, 1, [](std::size_t, std::size_t) { return 0.0; });
    EXPECT_THROW(high_error_analysis(attribute_errors(zero.forecasts, zero.actuals, zero.h, 1)), ValidationError);
}

namespace {

std::vector<features::FeatureVector> feature_rows(std::size_t n, Rng& rng) {
    std::vector<features::FeatureVector> out(n);
    for (auto& f : out) {
        f.trend_strength = rng.uniform();
        f.spike = rng.uniform(0, 5);
        f.lumpiness = rng.uniform(1, 2);
        f.seasonal_strength = rng.uniform();
        f.peak = static_cast<double>(rng.below(24));
    }
    return out;
}

std::vector<SeriesId> bus_ids(std::size_t n) {
    std::vector<SeriesId> ids;
    for (std::size_t i = 0; i < n; ++i) ids.push_back({"B" + std::to_string(100 + i), Level::Bus});
    return ids;
}

}  // namespace

TEST(FeatureProfile, AllBusScaledIqrIsOne) {
    Rng rng(6);
    const std::size_t n = 40;
    std::vector<double> mae(n);
    for (auto& m : mae) m = rng.uniform();
    const auto p = diagnose::feature_error_profile(bus_ids(n), feature_rows(n, rng), mae);
    EXPECT_EQ(p.worst.size(), 10u);
    EXPECT_EQ(p.rows.size(), 12u);
    for (const auto& r : p.rows) {
        if (r.degenerate) continue;
        EXPECT_NEAR(r.scaled_all_iqr(), 1.0, 1e-12) << r.feature;
        EXPECT_NEAR(r.all_scaled.median, 0.0, 1e-12);
    }
}

TEST(FeatureProfile, WorstEqualsAllWhenEveryBusIsWorst) {
    Rng rng(7);
    const std::size_t n = 12;
    std::vector<double> mae(n);
    for (auto& m : mae) m = rng.uniform();
    const auto p = diagnose::feature_error_profile(bus_ids(n), feature_rows(n, rng), mae, n);
    for (const auto& r : p.rows) {
        EXPECT_EQ(r.all.q1, r.worst.q1);
        EXPECT_EQ(r.all.q3, r.worst.q3);
    }
}

TEST(FeatureProfile, LumpyWorstBusesStandOut) {
    Rng rng(8);
    const std::size_t n = 50;
    auto feats = feature_rows(n, rng);
    std::vector<double> mae(n, 1.0);
    for (std::size_t i = 0; i < 10; ++i) {
        mae[i] = 10.0 + static_cast<double>(i);
        feats[i].lumpiness *= 10.0 * (1.0 + 0.2 * static_cast<double>(i));
    }
    const auto p = diagnose::feature_error_profile(bus_ids(n), feats, mae);
    for (const auto& r : p.rows) {
        if (r.feature == "lumpiness") {
            EXPECT_GT(r.scaled_worst_iqr(), 5.0);
        }
    }
    EXPECT_EQ(p.worst.front().id, "B109");
}

TEST(FeatureProfile, Errors) {
    Rng rng(9);
    EXPECT_THROW(diagnose::feature_error_profile(bus_ids(5), feature_rows(5, rng), std::vector<double>(5, 1.0)),
                 ValidationError);
    EXPECT_THROW(diagnose::feature_error_profile(bus_ids(5), feature_rows(5, rng), std::vector<double>(5, 1.0), 0),
                 ValidationError);
}

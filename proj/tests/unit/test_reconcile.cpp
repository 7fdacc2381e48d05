#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

#include "gridcast/core/rng.hpp"
#include "gridcast/data/split.hpp"
#include "gridcast/reconcile/reconcile.hpp"
#include "support/fixtures.hpp"

using namespace gridcast;

namespace {

const Timestamp kOrigin = make_timestamp(2022, 5, 3, 14);

Hierarchy hierarchy(const std::vector<double>& props, double scale = 1.0) {
    Hierarchy h;
    h.utility = {"U1", Level::Utility};
    for (std::size_t i = 0; i < props.size(); ++i) {
        const std::string id = "B" + std::to_string(i + 1);
        h.buses.push_back({id, Level::Bus});
        h.proportions[id] = props[i];
    }
    h.agg_scale = scale;
    return h;
}

ForecastBundle bundle(SeriesId id, std::vector<std::vector<double>> values, bool components = true) {
    ForecastBundle fb;
    fb.series = std::move(id);
    fb.origin = kOrigin;
    fb.quantiles = values.size() == 3 ? std::vector<double>{0.01, 0.5, 0.99} : std::vector<double>{0.5};
    fb.values = std::move(values);
    if (components) {
        const auto& med = fb.median();
        const auto n = med.size();
        fb.components["trend"].assign(n, 0.0);
        fb.components["seasonality"].assign(n, 1.0);
        fb.components["events"].assign(n, 0.0);
        fb.components["temperature"].assign(n, 0.5);
        fb.components["autoregression"].resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            fb.components["trend"][i] = med[i] - 1.5 - 0.25;
            fb.components["autoregression"][i] = 0.25;
        }
    }
    return fb;
}

double sum_any_order(std::vector<double> v, Rng& rng) {
    rng.shuffle(v);
    double s = 0.0;
    for (double x : v) s += x;
    return s;
}

}  // namespace

TEST(TopDown, EvenSplit) {
    const auto h = hierarchy({0.5, 0.5});
    const auto out = reconcile::top_down(bundle(h.utility, {{10.0}}), h);
    ASSERT_EQ(out.size(), 2u);
    EXPECT_EQ(out[0].values[0][0], 5.0);
    EXPECT_EQ(out[1].values[0][0], 5.0);
    EXPECT_EQ(out[0].series.id, "B1");
    EXPECT_EQ(out[0].reconciliation, "top_down");
    EXPECT_NEAR(out[0].components.at("seasonality")[0], 0.5, 1e-15);
}

TEST(TopDown, ZeroProportionAnnihilates) {
    const auto h = hierarchy({0.0, 0.3, 0.7});
    const auto out = reconcile::top_down(bundle(h.utility, {{13.7, 1e-3, 4e5}}, false), h);
    for (double v : out[0].values[0]) EXPECT_EQ(v, 0.0);
    const std::vector<double> in = {13.7, 1e-3, 4e5};
    for (std::size_t t = 0; t < 3; ++t) EXPECT_EQ(out[1].values[0][t] + out[2].values[0][t], in[t]);
}

TEST(TopDownProperty, SumsToInputExactlyInAnyOrder) {
    Rng rng(1);
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t n = 1 + rng.below(40);
        std::vector<double> p(n);
        for (auto& x : p) x = rng.uniform() < 0.1 ? 0.0 : rng.uniform(0.0, 1.0);
        if (std::accumulate(p.begin(), p.end(), 0.0) == 0.0) p[0] = 1.0;
        const auto h = hierarchy(p);
        std::vector<std::vector<double>> vals(3, std::vector<double>(33));
        for (auto& row : vals) {
            for (auto& v : row) v = std::ldexp(rng.uniform(-1.0, 1.0), static_cast<int>(rng.below(40)) - 10);
        }
        const auto out = reconcile::top_down(bundle(h.utility, vals), h);
        for (std::size_t q = 0; q < 3; ++q) {
            for (std::size_t t = 0; t < 33; ++t) {
                std::vector<double> parts;
                for (const auto& b : out) parts.push_back(b.values[q][t]);
                EXPECT_EQ(sum_any_order(parts, rng), vals[q][t]);
                EXPECT_EQ(sum_any_order(parts, rng), vals[q][t]);
                // Each share is within a few units in the last place of the
                // plain proportional value.
                const double total = std::accumulate(p.begin(), p.end(), 0.0);
                for (std::size_t i = 0; i < n; ++i) {
                    EXPECT_NEAR(parts[i], p[i] / total * vals[q][t], 1e-12 * std::abs(vals[q][t]) + 1e-300);
                }
            }
        }
        for (const auto& b : out) EXPECT_LE(b.additivity_gap(), 1e-6);
    }
}

TEST(TopDown, Errors) {
    const auto h = hierarchy({0.5, 0.5});
    EXPECT_THROW(reconcile::top_down(bundle({"U2", Level::Utility}, {{1.0}}), h), NotFound);
    EXPECT_THROW(reconcile::top_down(bundle({"U1", Level::Bus}, {{1.0}}), h), NotFound);
}

TEST(BottomUp, SumsBuses) {
    const auto h = hierarchy({0.5, 0.5});
    const auto u = reconcile::bottom_up({bundle({"B1", Level::Bus}, {{3.0}}), bundle({"B2", Level::Bus}, {{4.0}})}, h);
    EXPECT_EQ(u.values[0][0], 7.0);
    EXPECT_EQ(u.series, h.utility);
    EXPECT_EQ(u.reconciliation, "bottom_up");
    EXPECT_EQ(u.interval_method, "summed");
    EXPECT_LE(u.additivity_gap(), 1e-12);
}

TEST(BottomUp, SingleBusIsIdentity) {
    const auto h = hierarchy({1.0});
    const auto b = bundle({"B1", Level::Bus}, {{1.0, 2.0}, {3.0, 4.0}, {5.0, 6.0}});
    const auto u = reconcile::bottom_up({b}, h);
    EXPECT_EQ(u.values, b.values);
    EXPECT_EQ(u.components, b.components);
    EXPECT_EQ(u.interval_method, "model");
}

TEST(BottomUpProperty, AdditiveAndCoherent) {
    Rng rng(2);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 1 + rng.below(30);
        const auto h = hierarchy(std::vector<double>(n, 1.0 / static_cast<double>(n)));
        std::vector<ForecastBundle> buses;
        for (std::size_t i = 0; i < n; ++i) {
            std::vector<std::vector<double>> v(3, std::vector<double>(33));
            for (auto& row : v) {
                for (auto& x : row) x = rng.uniform(0.0, 500.0);
            }
            buses.push_back(bundle(h.buses[i], v));
        }
        // Input order does not matter: the hierarchy fixes summation order.
        auto shuffled = buses;
        rng.shuffle(shuffled);
        const auto u = reconcile::bottom_up(shuffled, h);
        EXPECT_EQ(u.values, reconcile::bottom_up(buses, h).values);
        EXPECT_LE(u.additivity_gap(), 1e-6);
        for (std::size_t t = 0; t < 33; ++t) {
            double s = 0.0;
            for (const auto& b : buses) s += b.values[1][t];
            EXPECT_NEAR(u.values[1][t], s, 1e-6);
        }
    }
}

TEST(BottomUp, Errors) {
    const auto h = hierarchy({0.5, 0.5});
    EXPECT_THROW(reconcile::bottom_up({bundle({"B1", Level::Bus}, {{3.0}})}, h), NotFound);
    auto late = bundle({"B2", Level::Bus}, {{4.0}});
    late.origin = kOrigin + 24;
    EXPECT_THROW(reconcile::bottom_up({bundle({"B1", Level::Bus}, {{3.0}}), late}, h), ValidationError);
    auto longer = bundle({"B2", Level::Bus}, {{4.0, 5.0}});
    EXPECT_THROW(reconcile::bottom_up({bundle({"B1", Level::Bus}, {{3.0}}), longer}, h), ValidationError);
}

TEST(BottomUp, MissingComponentsDropDecomposition) {
    const auto h = hierarchy({0.5, 0.5});
    const auto u = reconcile::bottom_up(
        {bundle({"B1", Level::Bus}, {{3.0}}), bundle({"B2", Level::Bus}, {{4.0}}, false)}, h);
    EXPECT_TRUE(u.components.empty());
}

TEST(Scale, IdentityAndProduct) {
    auto h = hierarchy({1.0});
    const auto agg = bundle(h.utility, {{100.0}});
    EXPECT_EQ(reconcile::scale_to_utility(agg, h).values, agg.values);
    h.agg_scale = 1.1;
    const auto s = reconcile::scale_to_utility(agg, h);
    EXPECT_NEAR(s.values[0][0], 110.0, 1e-12);
    EXPECT_EQ(s.reconciliation, "bottom_up_scaled");
    EXPECT_LE(s.additivity_gap(), 1e-9);
}

TEST(Scale, ScaledTrainingAggregateMatchesUtilityMean) {
    const Timestamp start = make_timestamp(2021, 1, 1);
    std::vector<LoadSeries> buses;
    for (int i = 0; i < 5; ++i) {
        buses.push_back(fixtures::daily_series("B" + std::to_string(i + 1), Level::Bus, start, 24 * 50,
                                               20.0 + 10.0 * i, 5.0, 1.0, 10 + static_cast<std::uint64_t>(i)));
    }
    auto utility = fixtures::daily_series("U1", Level::Utility, start, 24 * 50, 0.0, 0.0, 0.0, 1);
    for (std::size_t t = 0; t < utility.size(); ++t) {
        double s = 0.0;
        for (const auto& b : buses) s += b.load[t];
        utility.load[t] = 1.07 * s + 3.0 * std::sin(static_cast<double>(t));
    }
    const auto h = data::compute_hierarchy_stats(utility, buses, {});
    const std::size_t n = data::train_hours(utility.size(), {});
    double agg = 0.0, u = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        double s = 0.0;
        for (const auto& b : buses) s += b.load[t];
        agg += h.agg_scale * s;
        u += utility.load[t];
    }
    EXPECT_NEAR(agg / static_cast<double>(n), u / static_cast<double>(n), 1e-9);
}

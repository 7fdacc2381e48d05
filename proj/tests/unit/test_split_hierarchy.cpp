#include <gtest/gtest.h>

#include <numeric>
#include <sstream>

#include "gridcast/data/csv.hpp"
#include "gridcast/data/split.hpp"
#include "support/fixtures.hpp"

using namespace gridcast;

namespace {

const Timestamp kStart = make_timestamp(2020, 1, 1);

}  // namespace

TEST(Split, EightyTwentyOnWholeHours) {
    const auto s = fixtures::daily_series("B1", Level::Bus, kStart, 1000, 10, 2, 0.5, 1);
    const auto [train, test] = data::split(s, {});
    EXPECT_EQ(train.size(), 800u);
    EXPECT_EQ(test.size(), 200u);
    EXPECT_EQ(train.end(), test.start);
    EXPECT_EQ(data::split_boundary(s, {}), kStart + 800);
    EXPECT_EQ(train.load.back(), s.load[799]);
    EXPECT_EQ(test.load.front(), s.load[800]);
    EXPECT_EQ(test.temperature.back(), s.temperature.back());
}

TEST(Split, FloorsFractionalBoundary) {
    const auto s = fixtures::daily_series("B1", Level::Bus, kStart, 17521, 10, 2, 0.5, 1);
    EXPECT_EQ(data::split(s, {}).first.size(), 14016u);  // floor(0.8 * 17521)
    EXPECT_EQ(data::split(s, {0.5}).first.size(), 8760u);
}

TEST(Split, Errors) {
    const auto s = fixtures::daily_series("B1", Level::Bus, kStart, 10, 10, 2, 0.5, 1);
    EXPECT_THROW(data::split(s, {1.0}), DataError);
    EXPECT_THROW(data::split(s, {0.0}), DataError);
    EXPECT_THROW(data::split(s, {0.01}), DataError);  // boundary at the first hour
    EXPECT_THROW(data::slice(s, kStart - 1, kStart + 3), DataError);
    EXPECT_THROW(data::split_at(s, kStart + 10), DataError);
}

TEST(Hierarchy, ProportionsAndScale) {
    // Two constant buses (1 and 3 MW) and a utility of 8 MW.
    std::vector<LoadSeries> buses = {fixtures::make_series("B1", Level::Bus, kStart, std::vector<double>(100, 1.0)),
                                     fixtures::make_series("B2", Level::Bus, kStart, std::vector<double>(100, 3.0))};
    const auto u = fixtures::make_series("U1", Level::Utility, kStart, std::vector<double>(100, 8.0));
    const auto h = data::compute_hierarchy_stats(u, buses, {});
    EXPECT_DOUBLE_EQ(h.proportions.at("B1"), 0.25);
    EXPECT_DOUBLE_EQ(h.proportions.at("B2"), 0.75);
    EXPECT_DOUBLE_EQ(h.agg_scale, 2.0);
    EXPECT_EQ(h.utility.id, "U1");
    EXPECT_EQ(h.buses.size(), 2u);
}

TEST(Hierarchy, UsesTrainingWindowOnly) {
    std::vector<double> b1(100, 1.0), b2(100, 1.0);
    for (std::size_t i = 80; i < 100; ++i) b1[i] = 1000.0;  // test window only
    std::vector<LoadSeries> buses = {fixtures::make_series("B1", Level::Bus, kStart, b1),
                                     fixtures::make_series("B2", Level::Bus, kStart, b2)};
    const auto u = fixtures::make_series("U1", Level::Utility, kStart, std::vector<double>(100, 2.0));
    const auto h = data::compute_hierarchy_stats(u, buses, {});
    EXPECT_DOUBLE_EQ(h.proportions.at("B1"), 0.5);
    EXPECT_DOUBLE_EQ(h.agg_scale, 1.0);
}

TEST(HierarchyProperty, ProportionsSumToOne) {
    Rng rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<LoadSeries> buses;
        const std::size_t n = 1 + rng.below(25);
        for (std::size_t i = 0; i < n; ++i) {
            buses.push_back(fixtures::daily_series("B" + std::to_string(i), Level::Bus, kStart, 300,
                                                   rng.uniform(5.0, 100.0), 3.0, 1.0, rng.next()));
        }
        const auto u = fixtures::daily_series("U1", Level::Utility, kStart, 300, 500.0, 3.0, 1.0, 9);
        const auto h = data::compute_hierarchy_stats(u, buses, {});
        double s = 0.0;
        for (const auto& [_, p] : h.proportions) {
            EXPECT_GE(p, 0.0);
            s += p;
        }
        EXPECT_NEAR(s, 1.0, 1e-12);
    }
}

TEST(Hierarchy, Errors) {
    const auto u = fixtures::make_series("U1", Level::Utility, kStart, std::vector<double>(100, 2.0));
    EXPECT_THROW(data::compute_hierarchy_stats(u, {}, {}), DataError);
    const auto late = fixtures::make_series("B1", Level::Bus, kStart + 5, std::vector<double>(100, 1.0));
    EXPECT_THROW(data::compute_hierarchy_stats(u, {late}, {}), DataError);
    const auto zero = fixtures::make_series("B1", Level::Bus, kStart, std::vector<double>(100, 0.0));
    EXPECT_THROW(data::compute_hierarchy_stats(u, {zero}, {}), DataError);
}

TEST(HierarchyCsv, RoundTripAndErrors) {
    std::istringstream in("utility_id,bus_id\nU1,B1\nU1,B2\nU2,B3\n");
    const auto hs = data::read_hierarchy(in);
    ASSERT_EQ(hs.size(), 2u);
    EXPECT_EQ(hs[0].buses.size(), 2u);
    EXPECT_EQ(hs[1].utility.id, "U2");
    std::ostringstream out;
    data::write_hierarchy(out, hs);
    EXPECT_EQ(out.str(), "utility_id,bus_id\nU1,B1\nU1,B2\nU2,B3\n");

    std::istringstream dup("utility_id,bus_id\nU1,B1\nU2,B1\n");
    try {
        data::read_hierarchy(dup);
        FAIL();
    } catch (const IngestError& e) {
        EXPECT_EQ(e.row(), 3u);
    }
    std::istringstream reserved("utility_id,bus_id,hourly_shares\nU1,B1,\n");
    EXPECT_EQ(data::read_hierarchy(reserved).size(), 1u);
}

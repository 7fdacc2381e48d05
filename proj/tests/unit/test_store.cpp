#include <gtest/gtest.h>

#include <fstream>

#include "gridcast/io/json.hpp"
#include "gridcast/service/adjustments.hpp"
#include "gridcast/service/store.hpp"
#include "support/service_fixture.hpp"

using namespace gridcast;
using namespace service_fixture;
using service::AdjustmentKind;
using service::AdjustmentRecord;
using service::ForecastStore;

namespace {

const Timestamp kFirst = kOrigin + 1;
const Timestamp kPastLast = kOrigin + 34;

void expect_same_bundle(const ForecastBundle& a, const ForecastBundle& b) {
    EXPECT_EQ(a.series, b.series);
    EXPECT_EQ(a.origin, b.origin);
    EXPECT_EQ(a.model, b.model);
    EXPECT_EQ(a.step_offset, b.step_offset);
    EXPECT_EQ(a.quantiles, b.quantiles);
    EXPECT_EQ(a.values, b.values);
    EXPECT_EQ(a.components, b.components);
    EXPECT_EQ(a.reconciliation, b.reconciliation);
    EXPECT_EQ(a.interval_method, b.interval_method);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

TEST(Store, PublishAndReadBack) {
    TempDir dir;
    ForecastStore store(dir.path());
    auto b = bus_bundle("B1", kOrigin, 20.0);
    b.values[1][3] = 0.1 + 0.2;  // not exactly representable in short decimal
    const auto rel = store.publish(b, "v1");
    EXPECT_EQ(rel, "forecasts/v1/bus/B1/20220503T14.json");
    expect_same_bundle(store.get(b.series, kOrigin, "v1"), b);
    EXPECT_FALSE(store.find(b.series, kOrigin + 1, "v1"));
    EXPECT_THROW(store.get(b.series, kOrigin, "v2"), NotFound);
}

TEST(Store, RepublishIsConflictAndKeepsOriginal) {
    TempDir dir;
    ForecastStore store(dir.path());
    const auto b = bus_bundle("B1", kOrigin, 20.0);
    store.publish(b, "v1");
    const auto before = slurp(store.bundle_path(b.series, kOrigin, "v1"));
    auto changed = b;
    changed.values[1][0] += 1.0;
    EXPECT_THROW(store.publish(changed, "v1"), Conflict);
    EXPECT_EQ(slurp(store.bundle_path(b.series, kOrigin, "v1")), before);
    // A different tag is a different key.
    EXPECT_NO_THROW(store.publish(changed, "v2"));
    std::size_t leftovers = 0;
    for (const auto& e : fs::recursive_directory_iterator(dir.path())) {
        if (e.path().string().find(".tmp") != std::string::npos) ++leftovers;
    }
    EXPECT_EQ(leftovers, 0u);
}

TEST(Store, ListingsAreSorted) {
    TempDir dir;
    ForecastStore store(dir.path());
    seed_store(store, "v1");
    EXPECT_EQ(store.origins({"B2", Level::Bus}, "v1"), (std::vector<Timestamp>{kOrigin, kOrigin + 24}));
    EXPECT_TRUE(store.origins({"B2", Level::Bus}, "v9").empty());
    const auto ids = store.forecast_series("v1");
    ASSERT_EQ(ids.size(), 3u);
    EXPECT_EQ(ids[0].id, "B1");
    EXPECT_EQ(store.tags(), std::vector<std::string>{"v1"});
}

TEST(Store, RejectsPathTokens) {
    TempDir dir;
    ForecastStore store(dir.path());
    auto b = bus_bundle("../B1", kOrigin, 20.0);
    EXPECT_THROW(store.publish(b, "v1"), ValidationError);
    EXPECT_THROW(store.publish(bus_bundle("B1", kOrigin, 20.0), ".."), ValidationError);
}

TEST(Store, ReopenSeesEverything) {
    TempDir dir;
    std::vector<AdjustmentRecord> written;
    {
        ForecastStore store(dir.path());
        seed_store(store, "v1");
        const auto hs = store.hierarchies();
        written.push_back(store.journal().append(load_factor({"B1"}, 0.5, kFirst, kFirst + 6), hs));
        written.push_back(store.journal().append(offset({"U1"}, "events", {2.0}, kFirst, kPastLast, Level::Utility), hs));
    }
    ForecastStore store(dir.path());
    const auto h = store.hierarchy("U1");
    EXPECT_EQ(h.proportions, hierarchy().proportions);
    EXPECT_EQ(h.buses, hierarchy().buses);
    expect_same_bundle(store.get({"B3", Level::Bus}, kOrigin + 24, "v1"), bus_bundle("B3", kOrigin + 24, 50.0));
    const auto a = store.actuals({"B3", Level::Bus});
    ASSERT_TRUE(a);
    EXPECT_EQ(a->size(), 58u);
    const auto recs = store.journal().records();
    ASSERT_EQ(recs.size(), 2u);
    for (std::size_t i = 0; i < 2; ++i) EXPECT_EQ(service::encode(recs[i]), service::encode(written[i]));
    EXPECT_EQ(recs[0].id, "adj-000001");
    EXPECT_EQ(recs[1].id, "adj-000002");
    EXPECT_THROW(store.hierarchy("U9"), NotFound);
}

TEST(Journal, ReplayIsIdempotent) {
    TempDir dir;
    const auto file = dir.path() / "adjustments.jsonl";
    const std::vector<Hierarchy> hs = {hierarchy()};
    {
        service::AdjustmentJournal j(file);
        j.append(load_factor({"B1", "B2"}, 0.0, kFirst, kFirst + 5), hs);
        j.append(offset({"B3"}, "temperature", {1.0, 2.0, 3.0}, kFirst + 2, kFirst + 5), hs);
        j.append(load_factor({"B1"}, 0.9, kFirst + 5, kPastLast), hs);
    }
    const auto bytes = slurp(file);
    service::AdjustmentJournal once(file);
    service::AdjustmentJournal twice(file);
    ASSERT_EQ(once.records().size(), 3u);
    const auto bundles = bus_bundles();
    const auto a = service::apply_adjustments(hs[0], bundles, once.records());
    const auto b = service::apply_adjustments(hs[0], bundles, twice.records());
    EXPECT_EQ(a.utility.values, b.utility.values);
    EXPECT_EQ(a.delta_mw, b.delta_mw);
    // Loading does not rewrite the file.
    EXPECT_EQ(slurp(file), bytes);
    // Each line carries the schema version.
    std::ifstream in(file);
    std::string line;
    while (std::getline(in, line)) EXPECT_EQ(io::json::parse(line).at("version"), service::kJournalVersion);
}

TEST(Journal, RejectsCorruptOrNewerFiles) {
    TempDir dir;
    const auto file = dir.path() / "adjustments.jsonl";
    {
        std::ofstream out(file);
        out << "{not json\n";
    }
    EXPECT_THROW(service::AdjustmentJournal{file}, DataError);
    {
        std::ofstream out(file);
        out << R"({"version": 99, "record": {}})" << "\n";
    }
    EXPECT_THROW(service::AdjustmentJournal{file}, DataError);
}

TEST(Journal, LoadFactorConflicts) {
    TempDir dir;
    service::AdjustmentJournal j(dir.path() / "a.jsonl");
    const std::vector<Hierarchy> hs = {hierarchy()};
    j.append(load_factor({"B1"}, 0.5, kFirst, kFirst + 10), hs);
    // Same bus, overlapping window.
    EXPECT_THROW(j.append(load_factor({"B1"}, 0.7, kFirst + 9, kFirst + 12), hs), Conflict);
    // Utility scope covers B1.
    EXPECT_THROW(j.append(load_factor({"U1"}, 0.7, kFirst + 3, kFirst + 4, Level::Utility), hs), Conflict);
    // Half-open windows: touching is not overlapping.
    EXPECT_NO_THROW(j.append(load_factor({"B1"}, 0.7, kFirst + 10, kFirst + 12), hs));
    // Another bus in the same window.
    EXPECT_NO_THROW(j.append(load_factor({"B2"}, 0.7, kFirst, kFirst + 10), hs));
    // Offsets never conflict.
    EXPECT_NO_THROW(j.append(offset({"B1"}, "trend", {1.0}, kFirst, kFirst + 10), hs));
    EXPECT_EQ(j.records().size(), 4u);
    EXPECT_EQ(j.active_at(kFirst + 9).size(), 3u);
    EXPECT_EQ(j.active_at(kFirst + 10).size(), 1u);
}

TEST(Journal, Validation) {
    TempDir dir;
    service::AdjustmentJournal j(dir.path() / "a.jsonl");
    const std::vector<Hierarchy> hs = {hierarchy()};
    EXPECT_THROW(j.append(load_factor({}, 0.5, kFirst, kFirst + 1), hs), ValidationError);
    EXPECT_THROW(j.append(load_factor({"B1"}, 1.5, kFirst, kFirst + 1), hs), ValidationError);
    EXPECT_THROW(j.append(load_factor({"B1"}, -0.1, kFirst, kFirst + 1), hs), ValidationError);
    EXPECT_THROW(j.append(load_factor({"B1"}, 0.5, kFirst, kFirst), hs), ValidationError);
    EXPECT_THROW(j.append(offset({"B1"}, "weather", {1.0}, kFirst, kFirst + 2), hs), ValidationError);
    EXPECT_THROW(j.append(offset({"B1"}, "trend", {1.0, 2.0, 3.0}, kFirst, kFirst + 2), hs), ValidationError);
    EXPECT_THROW(j.append(load_factor({"U1", "U2"}, 0.5, kFirst, kFirst + 1, Level::Utility), hs), ValidationError);
    EXPECT_THROW(j.append(load_factor({"B1", "B7"}, 0.5, kFirst, kFirst + 1), hs), NotFound);
    EXPECT_THROW(j.append(load_factor({"U7"}, 0.5, kFirst, kFirst + 1, Level::Utility), hs), NotFound);
    EXPECT_TRUE(j.records().empty());
    EXPECT_THROW(service::parse_adjustment_kind("scale"), ValidationError);
    EXPECT_THROW(service::decode_adjustment(io::json{{"kind", "load_factor"}}), ValidationError);
}

TEST(Adjustments, EncodeDecodeRoundTrip) {
    auto r = offset({"B1", "B2"}, "seasonality", {1.5, -2.0}, kFirst, kFirst + 2);
    r.id = "adj-000007";
    r.created_at = "2022-05-03T10:00:00Z";
    EXPECT_EQ(service::encode(service::decode_adjustment(service::encode(r))), service::encode(r));
}

TEST(Adjustments, EmptyLogAndUnitFactorAreIdentities) {
    const auto h = hierarchy();
    const auto bundles = bus_bundles();
    const auto none = service::apply_adjustments(h, bundles, {});
    EXPECT_EQ(none.utility.values, none.utility_raw.values);
    EXPECT_EQ(none.utility.components, none.utility_raw.components);
    for (double d : none.delta_mw) EXPECT_EQ(d, 0.0);
    EXPECT_TRUE(none.applied.empty());

    const auto unit = service::apply_adjustments(h, bundles, {load_factor({"U1"}, 1.0, kFirst, kPastLast, Level::Utility)});
    EXPECT_EQ(unit.utility.values, unit.utility_raw.values);
    for (double d : unit.delta_mw) EXPECT_EQ(d, 0.0);
}

TEST(Adjustments, ZeroFactorRemovesBusLoad) {
    const auto h = hierarchy();
    const auto bundles = bus_bundles();
    auto lf = load_factor({"B2"}, 0.0, kFirst + 4, kFirst + 10);
    lf.id = "adj-1";
    const auto v = service::apply_adjustments(h, bundles, {lf});
    const auto& b2 = bundles[1].median();
    for (std::size_t k = 0; k < 33; ++k) {
        const bool in = k >= 4 && k < 10;
        EXPECT_NEAR(v.delta_mw[k], in ? -b2[k] : 0.0, 1e-9) << k;
        EXPECT_EQ(v.buses[1].median()[k], in ? 0.0 : b2[k]);
        for (std::size_t q = 0; q < 3; ++q) EXPECT_EQ(v.buses[1].values[q][k], in ? 0.0 : bundles[1].values[q][k]);
        EXPECT_EQ(v.buses[0].median()[k], bundles[0].median()[k]);
    }
    EXPECT_EQ(v.applied, std::vector<std::string>{"adj-1"});
    EXPECT_LE(v.utility.additivity_gap(), 1e-9);
}

TEST(Adjustments, FactorScalesQuantilesAndComponents) {
    const auto h = hierarchy();
    const auto bundles = bus_bundles();
    const auto v = service::apply_adjustments(h, bundles, {load_factor({"B3"}, 0.8, kFirst, kPastLast)});
    for (std::size_t k = 0; k < 33; ++k) {
        for (std::size_t q = 0; q < 3; ++q) EXPECT_DOUBLE_EQ(v.buses[2].values[q][k], 0.8 * bundles[2].values[q][k]);
        EXPECT_NEAR(v.delta_mw[k], -0.2 * bundles[2].median()[k], 1e-9);
    }
    EXPECT_LE(v.buses[2].additivity_gap(), 1e-9);
}

TEST(Adjustments, OffsetsShiftComponentAndEveryQuantile) {
    const auto h = hierarchy();
    const auto bundles = bus_bundles();
    std::vector<double> per_hour(5);
    for (std::size_t i = 0; i < 5; ++i) per_hour[i] = static_cast<double>(i + 1);
    const auto v = service::apply_adjustments(h, bundles, {offset({"B1"}, "temperature", per_hour, kFirst + 2, kFirst + 7)});
    for (std::size_t k = 0; k < 33; ++k) {
        const double off = k >= 2 && k < 7 ? static_cast<double>(k - 1) : 0.0;
        EXPECT_NEAR(v.delta_mw[k], off, 1e-9);
        for (std::size_t q = 0; q < 3; ++q) EXPECT_NEAR(v.buses[0].values[q][k], bundles[0].values[q][k] + off, 1e-12);
        EXPECT_NEAR(v.buses[0].components.at("temperature")[k], bundles[0].components.at("temperature")[k] + off, 1e-12);
    }
    EXPECT_LE(v.utility.additivity_gap(), 1e-9);
}

TEST(Adjustments, UtilityOffsetIsSplitByProportion) {
    const auto h = hierarchy();
    const auto bundles = bus_bundles();
    const auto v = service::apply_adjustments(h, bundles, {offset({"U1"}, "events", {10.0}, kFirst, kPastLast, Level::Utility)});
    for (std::size_t k = 0; k < 33; ++k) {
        EXPECT_NEAR(v.delta_mw[k], 10.0, 1e-9);
        EXPECT_NEAR(v.buses[0].median()[k] - bundles[0].median()[k], 2.0, 1e-12);
        EXPECT_NEAR(v.buses[2].median()[k] - bundles[2].median()[k], 5.0, 1e-12);
    }
}

TEST(Adjustments, FactorAppliesBeforeOffset) {
    const auto h = hierarchy();
    const auto bundles = bus_bundles();
    // Order in the log does not matter: the offset is not scaled.
    const std::vector<AdjustmentRecord> log = {offset({"B1"}, "trend", {4.0}, kFirst, kPastLast),
                                               load_factor({"B1"}, 0.5, kFirst, kPastLast)};
    const auto v = service::apply_adjustments(h, bundles, log);
    for (std::size_t k = 0; k < 33; ++k) {
        EXPECT_NEAR(v.buses[0].median()[k], 0.5 * bundles[0].median()[k] + 4.0, 1e-12);
    }
}

TEST(Adjustments, OtherUtilitiesAreIgnored) {
    const auto h = hierarchy();
    const auto v = service::apply_adjustments(h, bus_bundles(), {load_factor({"U2"}, 0.0, kFirst, kPastLast, Level::Utility)});
    EXPECT_EQ(v.utility.values, v.utility_raw.values);
    EXPECT_TRUE(v.applied.empty());
}

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gridcast/core/error.hpp"
#include "gridcast/diagnose/attribution.hpp"
#include "gridcast/io/json.hpp"
#include "gridcast/reconcile/reconcile.hpp"
#include "gridcast/service/adjustments.hpp"
#include "gridcast/service/store.hpp"

namespace gridcast::service {

using io::json;

/// Request handlers over a store, independent of the transport. Every
/// handler returns the JSON payload or throws a library error.
class Service {
public:
    Service(ForecastStore& store, std::string default_tag) : store_(store), tag_(std::move(default_tag)) {}

    const std::string& default_tag() const { return tag_; }
    ForecastStore& store() { return store_; }

    std::string tag_or_default(const std::optional<std::string>& tag) const { return tag.value_or(tag_); }

    json health() const { return {{"status", "ok"}, {"model_tag", tag_}}; }

    json series(const std::optional<std::string>& tag) const {
        const std::string t = tag_or_default(tag);
        json list = json::array();
        for (const auto& s : store_.forecast_series(t)) {
            json origins = json::array();
            for (auto o : store_.origins(s, t)) origins.push_back(format_timestamp(o));
            list.push_back({{"id", s.id}, {"level", to_string(s.level)}, {"origins", origins}});
        }
        json utils = json::array();
        for (const auto& h : store_.hierarchies()) {
            json buses = json::array();
            for (const auto& b : h.buses) buses.push_back(b.id);
            utils.push_back({{"id", h.utility.id}, {"buses", buses}});
        }
        return {{"model_tag", t}, {"series", list}, {"utilities", utils}};
    }

    /// Stored bundle; a utility without a stored bundle is summed from its buses.
    ForecastBundle bundle(const SeriesId& id, Timestamp origin, const std::string& tag) const {
        if (auto b = store_.find(id, origin, tag)) return *b;
        if (id.level == Level::Utility) {
            for (const auto& h : store_.hierarchies()) {
                if (h.utility.id == id.id) return reconcile::bottom_up(bus_bundles(h, origin, tag), h);
            }
        }
        throw NotFound("no forecast for " + id.id + " at " + format_timestamp(origin) + " under tag " + tag);
    }

    std::vector<ForecastBundle> bus_bundles(const Hierarchy& h, Timestamp origin, const std::string& tag) const {
        std::vector<ForecastBundle> out;
        for (const auto& b : h.buses) out.push_back(store_.get(b, origin, tag));
        return out;
    }

    json forecast(const SeriesId& id, Timestamp origin, const std::optional<std::string>& tag) const {
        const std::string t = tag_or_default(tag);
        const auto b = bundle(id, origin, t);
        json actual = json::array();
        const auto obs = store_.actuals(id);
        json hours = json::array();
        for (std::size_t i = 0; i < b.length(); ++i) {
            const Timestamp h = b.hour(i);
            hours.push_back(format_timestamp(h));
            if (obs && obs->contains(h) && !is_missing(obs->load[obs->index_of(h)])) {
                actual.push_back(obs->load[obs->index_of(h)]);
            } else {
                actual.push_back(nullptr);
            }
        }
        return {{"model_tag", t}, {"forecast", io::encode(b)}, {"hours", hours}, {"actuals", actual}};
    }

    json components(const SeriesId& id, Timestamp origin, const std::optional<std::string>& tag) const {
        const std::string t = tag_or_default(tag);
        const auto b = bundle(id, origin, t);
        json hours = json::array();
        for (std::size_t i = 0; i < b.length(); ++i) hours.push_back(format_timestamp(b.hour(i)));
        json comps = json::object();
        for (const auto& [name, v] : b.components) comps[name] = v;
        json bands = json::object();
        for (std::size_t q = 0; q < b.quantiles.size(); ++q) bands[io::json(b.quantiles[q]).dump()] = b.values[q];
        return {{"model_tag", t},
                {"series", io::encode(b.series)},
                {"origin", format_timestamp(b.origin)},
                {"hours", hours},
                {"median", b.median()},
                {"components", comps},
                {"quantiles", bands},
                {"additivity_gap", b.additivity_gap()}};
    }

    diagnose::AttributionResult attribution_result(const std::string& utility, std::optional<Timestamp> from,
                                                   std::optional<Timestamp> to, std::size_t top_n,
                                                   const std::optional<std::string>& tag) const {
        const std::string t = tag_or_default(tag);
        const Hierarchy h = store_.hierarchy(utility);
        if (h.buses.empty()) throw ValidationError("utility has no buses");
        std::vector<ForecastBundle> buses;
        for (auto o : store_.origins(h.buses.front(), t)) {
            if ((from && o < *from) || (to && o > *to)) continue;
            auto part = bus_bundles(h, o, t);
            buses.insert(buses.end(), part.begin(), part.end());
        }
        if (buses.empty()) throw NotFound("no bus forecasts in the requested range");
        std::map<std::string, LoadSeries> actuals;
        for (const auto& b : h.buses) {
            auto a = store_.actuals(b);
            if (!a) throw NotFound("actuals not ingested for bus " + b.id);
            actuals[b.id] = std::move(*a);
        }
        return diagnose::attribute_errors(buses, actuals, h, top_n);
    }

    json attribution(const std::string& utility, std::optional<Timestamp> from, std::optional<Timestamp> to,
                     std::size_t top_n, const std::optional<std::string>& tag) const {
        return io::encode(attribution_result(utility, from, to, top_n, tag));
    }

    json high_error(const std::string& utility, std::optional<Timestamp> from, std::optional<Timestamp> to,
                    double quantile, const std::optional<std::string>& tag) const {
        const auto a = attribution_result(utility, from, to, 0, tag);
        const auto [pos, neg] = diagnose::high_error_analysis(a, quantile);
        return {{"utility", utility}, {"quantile", quantile}, {"positive", io::encode(pos)}, {"negative", io::encode(neg)}};
    }

    json post_adjustment(const json& body) {
        AdjustmentRecord r = decode_adjustment(body);
        r.id.clear();
        return encode(store_.journal().append(r, store_.hierarchies()));
    }

    json list_adjustments(std::optional<Timestamp> active_at) const {
        const auto recs = active_at ? store_.journal().active_at(*active_at) : store_.journal().records();
        json out = json::array();
        for (const auto& r : recs) out.push_back(encode(r));
        return {{"adjustments", out}};
    }

    /// Adjusted view from the journal plus optional unsaved drafts. Drafts are
    /// validated and conflict-checked as if appended, but never persisted.
    json adjusted(const std::string& utility, Timestamp origin, const std::vector<AdjustmentRecord>& drafts,
                  const std::optional<std::string>& tag) const {
        const std::string t = tag_or_default(tag);
        const Hierarchy h = store_.hierarchy(utility);
        auto records = store_.journal().records();
        const auto hs = store_.hierarchies();
        std::size_t n = 0;
        for (auto d : drafts) {
            d.validate();
            if (!applies_to(d, h)) throw NotFound("draft scope matches no bus of utility " + utility);
            affected_buses(d, h);
            check_conflicts(d, records, hs);
            d.id = "draft-" + std::to_string(++n);
            records.push_back(d);
        }
        const auto view = apply_adjustments(h, bus_bundles(h, origin, t), records);
        json buses = json::array();
        for (const auto& b : view.buses) buses.push_back(io::encode(b));
        json hours = json::array();
        for (std::size_t i = 0; i < view.utility.length(); ++i) hours.push_back(format_timestamp(view.utility.hour(i)));
        return {{"model_tag", t},
                {"dry_run", !drafts.empty()},
                {"hours", hours},
                {"utility_raw", io::encode(view.utility_raw)},
                {"utility", io::encode(view.utility)},
                {"buses", buses},
                {"delta_mw", view.delta_mw},
                {"applied", view.applied}};
    }

private:
    ForecastStore& store_;
    std::string tag_;
};

}  // namespace gridcast::service

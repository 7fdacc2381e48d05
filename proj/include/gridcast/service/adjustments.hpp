#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "gridcast/core/error.hpp"
#include "gridcast/core/forecast.hpp"
#include "gridcast/core/types.hpp"
#include "gridcast/io/json.hpp"
#include "gridcast/reconcile/reconcile.hpp"

namespace gridcast::service {

enum class AdjustmentKind { LoadFactor, ComponentOffset };

inline std::string to_string(AdjustmentKind k) { return k == AdjustmentKind::LoadFactor ? "load_factor" : "component_offset"; }

inline AdjustmentKind parse_adjustment_kind(const std::string& s) {
    if (s == "load_factor") return AdjustmentKind::LoadFactor;
    if (s == "component_offset") return AdjustmentKind::ComponentOffset;
    throw ValidationError("unknown adjustment kind '" + s + "'");
}

inline constexpr int kJournalVersion = 1;

/// Operator intervention over the hours [valid_from, valid_to). The scope is
/// a set of buses, or a utility (meaning all of its buses). Offsets hold one
/// value for the whole window or one value per window hour.
struct AdjustmentRecord {
    std::string id;
    Level scope_level = Level::Bus;
    std::vector<std::string> scope_ids;
    AdjustmentKind kind = AdjustmentKind::LoadFactor;
    double load_factor = 1.0;
    std::string component;
    std::vector<double> offsets_mw;
    Timestamp valid_from;
    Timestamp valid_to;
    std::string author;
    std::string created_at;

    bool covers(Timestamp t) const { return t >= valid_from && t < valid_to; }

    double offset_at(Timestamp t) const {
        if (offsets_mw.size() == 1) return offsets_mw.front();
        return offsets_mw[static_cast<std::size_t>(t - valid_from)];
    }

    void validate() const {
        if (scope_ids.empty()) throw ValidationError("adjustment scope is empty");
        if (scope_level == Level::Utility && scope_ids.size() != 1) {
            throw ValidationError("a utility scope names exactly one utility");
        }
        if (!(valid_from < valid_to)) throw ValidationError("valid_from must precede valid_to");
        if (kind == AdjustmentKind::LoadFactor) {
            if (!(load_factor >= 0.0 && load_factor <= 1.0)) throw ValidationError("load_factor must lie in [0, 1]");
        } else {
            if (!is_component_name(component)) throw ValidationError("unknown component '" + component + "'");
            const auto hours = static_cast<std::size_t>(valid_to - valid_from);
            if (offsets_mw.size() != 1 && offsets_mw.size() != hours) {
                throw ValidationError("offsets_mw needs 1 value or one per window hour");
            }
        }
    }
};

inline io::json encode(const AdjustmentRecord& r) {
    io::json j = {{"id", r.id},
                  {"scope", {{"level", to_string(r.scope_level)}, {"ids", r.scope_ids}}},
                  {"kind", to_string(r.kind)},
                  {"valid_from", format_timestamp(r.valid_from)},
                  {"valid_to", format_timestamp(r.valid_to)},
                  {"author", r.author},
                  {"created_at", r.created_at}};
    if (r.kind == AdjustmentKind::LoadFactor) {
        j["load_factor"] = r.load_factor;
    } else {
        j["component"] = r.component;
        j["offsets_mw"] = r.offsets_mw;
    }
    return j;
}

inline AdjustmentRecord decode_adjustment(const io::json& j) {
    try {
        AdjustmentRecord r;
        r.id = io::get_or<std::string>(j, "id", "");
        const auto& scope = j.at("scope");
        r.scope_level = parse_level(scope.at("level").get<std::string>());
        r.scope_ids = scope.at("ids").get<std::vector<std::string>>();
        r.kind = parse_adjustment_kind(j.at("kind").get<std::string>());
        if (r.kind == AdjustmentKind::LoadFactor) {
            r.load_factor = j.at("load_factor").get<double>();
        } else {
            r.component = j.at("component").get<std::string>();
            r.offsets_mw = j.at("offsets_mw").get<std::vector<double>>();
        }
        r.valid_from = parse_timestamp(j.at("valid_from").get<std::string>());
        r.valid_to = parse_timestamp(j.at("valid_to").get<std::string>());
        r.author = io::get_or<std::string>(j, "author", "");
        r.created_at = io::get_or<std::string>(j, "created_at", "");
        r.validate();
        return r;
    } catch (const io::json::exception& e) {
        throw ValidationError(std::string("malformed adjustment: ") + e.what());
    } catch (const DataError& e) {
        throw ValidationError(std::string("malformed adjustment: ") + e.what());
    }
}

/// Bus ids an adjustment touches, checked against the hierarchy.
inline std::vector<std::string> affected_buses(const AdjustmentRecord& r, const Hierarchy& h) {
    std::vector<std::string> out;
    if (r.scope_level == Level::Utility) {
        if (r.scope_ids.front() != h.utility.id) return out;
        for (const auto& b : h.buses) out.push_back(b.id);
        return out;
    }
    for (const auto& id : r.scope_ids) {
        if (!h.has_bus(id)) throw NotFound("adjustment scope references unknown bus '" + id + "'");
        out.push_back(id);
    }
    return out;
}

/// True when the record targets series of hierarchy `h`.
inline bool applies_to(const AdjustmentRecord& r, const Hierarchy& h) {
    if (r.scope_level == Level::Utility) return r.scope_ids.front() == h.utility.id;
    return std::any_of(r.scope_ids.begin(), r.scope_ids.end(), [&](const std::string& id) { return h.has_bus(id); });
}

/// Rejects a load factor whose buses and window overlap an existing one.
inline void check_conflicts(const AdjustmentRecord& candidate, const std::vector<AdjustmentRecord>& existing,
                            const std::vector<Hierarchy>& hierarchies) {
    if (candidate.kind != AdjustmentKind::LoadFactor) return;
    for (const auto& h : hierarchies) {
        if (!applies_to(candidate, h)) continue;
        const auto mine = affected_buses(candidate, h);
        const std::set<std::string> mine_set(mine.begin(), mine.end());
        for (const auto& e : existing) {
            if (e.kind != AdjustmentKind::LoadFactor || !applies_to(e, h)) continue;
            if (!(candidate.valid_from < e.valid_to && e.valid_from < candidate.valid_to)) continue;
            for (const auto& b : affected_buses(e, h)) {
                if (mine_set.count(b)) {
                    throw Conflict("load factor overlaps adjustment " + e.id + " on bus " + b);
                }
            }
        }
    }
}

struct AdjustedView {
    ForecastBundle utility_raw;
    ForecastBundle utility;
    std::vector<ForecastBundle> buses;
    std::vector<double> delta_mw;  // adjusted - raw utility median, per hour
    std::vector<std::string> applied;
};

/// Applies adjustments to copies of the bus bundles and re-aggregates them
/// bottom-up. Per bus, load factors scale every quantile and component over
/// their window; component offsets are then added to the named component and
/// to every quantile. Utility-scoped offsets are split over buses by the
/// hierarchy proportions.
inline AdjustedView apply_adjustments(const Hierarchy& h, const std::vector<ForecastBundle>& bus_bundles,
                                      const std::vector<AdjustmentRecord>& adjustments) {
    AdjustedView view;
    view.utility_raw = reconcile::bottom_up(bus_bundles, h);
    std::map<std::string, std::size_t> idx;
    view.buses = bus_bundles;
    for (std::size_t i = 0; i < view.buses.size(); ++i) idx[view.buses[i].series.id] = i;

    std::vector<const AdjustmentRecord*> ordered;
    for (const auto kind : {AdjustmentKind::LoadFactor, AdjustmentKind::ComponentOffset}) {
        for (const auto& r : adjustments) {
            if (r.kind == kind) ordered.push_back(&r);
        }
    }
    std::set<std::string> applied;
    for (const auto* rp : ordered) {
        const auto& r = *rp;
        if (!applies_to(r, h)) continue;
        r.validate();
        const auto buses = affected_buses(r, h);
        bool touched = false;
        for (const auto& bid : buses) {
            auto it = idx.find(bid);
            if (it == idx.end()) throw NotFound("no forecast for bus " + bid);
            ForecastBundle& fb = view.buses[it->second];
            const double share = r.scope_level == Level::Utility ? h.proportions.at(bid) : 1.0;
            for (std::size_t k = 0; k < fb.length(); ++k) {
                const Timestamp t = fb.hour(k);
                if (!r.covers(t)) continue;
                touched = true;
                if (r.kind == AdjustmentKind::LoadFactor) {
                    for (auto& row : fb.values) row[k] *= r.load_factor;
                    for (auto& [_, comp] : fb.components) comp[k] *= r.load_factor;
                } else {
                    const double off = share * r.offset_at(t);
                    for (auto& row : fb.values) row[k] += off;
                    auto c = fb.components.find(r.component);
                    if (c != fb.components.end()) c->second[k] += off;
                }
            }
        }
        if (touched) applied.insert(r.id);
    }
    for (const auto& r : adjustments) {
        if (applied.count(r.id)) view.applied.push_back(r.id);
    }
    view.utility = reconcile::bottom_up(view.buses, h);
    const auto& a = view.utility.median();
    const auto& b = view.utility_raw.median();
    view.delta_mw.resize(a.size());
    for (std::size_t k = 0; k < a.size(); ++k) view.delta_mw[k] = a[k] - b[k];
    return view;
}

}  // namespace gridcast::service

#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "gridcast/core/error.hpp"
#include "gridcast/core/forecast.hpp"
#include "gridcast/core/types.hpp"
#include "gridcast/eval/evaluate.hpp"

namespace gridcast::diagnose {

/// Residuals follow actual - forecast; positive means under-forecast.
inline constexpr const char* kResidualConvention = "actual - forecast";

struct AttributionRow {
    Timestamp timestamp;
    double utility_residual = 0.0;
    std::vector<double> bus_residuals;  // aligned with AttributionResult::top_buses
    double remainder_residual = 0.0;
};

struct AttributionResult {
    std::vector<SeriesId> buses;                 // hierarchy order
    std::vector<SeriesId> top_buses;             // by load share, descending
    std::vector<double> load_share;              // aligned with buses
    std::vector<AttributionRow> rows;            // ascending timestamp
    std::vector<std::vector<double>> residuals;  // rows x buses
};

namespace detail {

/// Sum over buses in id order so results do not depend on hierarchy order.
inline double canonical_sum(const std::vector<double>& v, const std::vector<std::size_t>& id_order) {
    double s = 0.0;
    for (std::size_t i : id_order) s += v[i];
    return s;
}

inline std::vector<std::size_t> id_order(const std::vector<SeriesId>& buses) {
    std::vector<std::size_t> o(buses.size());
    std::iota(o.begin(), o.end(), std::size_t{0});
    std::sort(o.begin(), o.end(), [&](std::size_t a, std::size_t b) { return buses[a].id < buses[b].id; });
    return o;
}

}  // namespace detail

/// Attributes utility residuals to buses over the target-day hours of each
/// origin. Every hierarchy bus needs a forecast at every origin. When
/// `utility` forecasts are given they must equal the bus sum (bottom-up);
/// otherwise the input is rejected.
inline AttributionResult attribute_errors(const std::vector<ForecastBundle>& bus_forecasts,
                                          const std::map<std::string, LoadSeries>& bus_actuals, const Hierarchy& h,
                                          std::size_t top_n, const std::vector<ForecastBundle>& utility = {}) {
    const std::size_t nb = h.buses.size();
    if (nb == 0) throw ValidationError("hierarchy has no buses");
    std::map<std::string, std::size_t> pos;
    for (std::size_t i = 0; i < nb; ++i) pos[h.buses[i].id] = i;

    std::map<Timestamp, std::vector<const ForecastBundle*>> by_origin;
    for (const auto& fb : bus_forecasts) {
        auto it = pos.find(fb.series.id);
        if (it == pos.end()) throw NotFound("bus " + fb.series.id + " is not in the hierarchy");
        auto& slot = by_origin[fb.origin];
        slot.resize(nb, nullptr);
        if (slot[it->second]) throw ValidationError("duplicate forecast for bus " + fb.series.id);
        slot[it->second] = &fb;
    }
    std::map<Timestamp, const ForecastBundle*> util_by_origin;
    for (const auto& u : utility) util_by_origin[u.origin] = &u;

    AttributionResult res;
    res.buses = h.buses;
    const auto ord = detail::id_order(h.buses);
    std::vector<double> load_sum(nb, 0.0);
    std::vector<Timestamp> stamps;
    for (const auto& [origin, slot] : by_origin) {
        for (std::size_t i = 0; i < nb; ++i) {
            if (!slot[i]) throw ValidationError("missing forecast for bus " + h.buses[i].id);
        }
        const ForecastBundle* u = nullptr;
        if (auto it = util_by_origin.find(origin); it != util_by_origin.end()) u = it->second;
        if (!utility.empty() && !u) throw ValidationError("missing utility forecast at an origin");
        const ForecastBundle& first = *slot[0];
        for (std::size_t k = 0; k < first.length(); ++k) {
            const Timestamp t = first.hour(k);
            if (!eval::on_target_day(origin, t)) continue;
            std::vector<double> r(nb);
            double fsum = 0.0;
            for (std::size_t i = 0; i < nb; ++i) {
                const ForecastBundle& fb = *slot[i];
                if (fb.hour(k) != t) throw ValidationError("bus forecasts are misaligned");
                auto a = bus_actuals.find(fb.series.id);
                if (a == bus_actuals.end() || !a->second.contains(t)) {
                    throw ValidationError("no actual for bus " + fb.series.id + " at " + format_timestamp(t));
                }
                const double y = a->second.load[a->second.index_of(t)];
                r[i] = y - fb.median()[k];
                fsum += fb.median()[k];
                load_sum[i] += y;
            }
            if (u) {
                const double uv = u->median()[k];
                if (std::abs(uv - fsum) > 1e-6 * std::max(1.0, std::abs(uv))) {
                    throw ValidationError("utility forecast is not the bottom-up sum of its buses");
                }
            }
            stamps.push_back(t);
            res.residuals.push_back(std::move(r));
        }
    }
    for (std::size_t i = 1; i < stamps.size(); ++i) {
        if (stamps[i] <= stamps[i - 1]) throw ValidationError("origins yield overlapping target hours");
    }

    const double total = std::accumulate(load_sum.begin(), load_sum.end(), 0.0);
    res.load_share.assign(nb, 0.0);
    if (total != 0.0) {
        for (std::size_t i = 0; i < nb; ++i) res.load_share[i] = load_sum[i] / total;
    }
    std::vector<std::size_t> by_share = ord;
    std::stable_sort(by_share.begin(), by_share.end(),
                     [&](std::size_t a, std::size_t b) { return res.load_share[a] > res.load_share[b]; });
    by_share.resize(std::min(top_n, nb));
    std::vector<bool> is_top(nb, false);
    for (std::size_t i : by_share) {
        res.top_buses.push_back(h.buses[i]);
        is_top[i] = true;
    }
    for (std::size_t r = 0; r < stamps.size(); ++r) {
        AttributionRow row;
        row.timestamp = stamps[r];
        const auto& rv = res.residuals[r];
        row.utility_residual = detail::canonical_sum(rv, ord);
        for (std::size_t i : by_share) row.bus_residuals.push_back(rv[i]);
        for (std::size_t i : ord) {
            if (!is_top[i]) row.remainder_residual += rv[i];
        }
        res.rows.push_back(std::move(row));
    }
    return res;
}

enum class Direction { Positive, Negative };

inline std::string to_string(Direction d) { return d == Direction::Positive ? "positive" : "negative"; }

struct BusShare {
    SeriesId bus;
    double bias_share = 0.0;
    double mae_share = 0.0;
    double overall_mae_share = 0.0;
    double overall_load_share = 0.0;
};

/// Bus shares of the utility error during the most extreme hours of one sign.
/// bias_share divides by the signed mean utility residual over the selection,
/// mae_share by the mean absolute utility residual.
struct HighErrorProfile {
    Direction direction = Direction::Positive;
    std::vector<Timestamp> selected;
    double mean_utility_residual = 0.0;
    double mean_abs_utility_residual = 0.0;
    std::vector<BusShare> buses;  // hierarchy order
};

inline std::pair<HighErrorProfile, HighErrorProfile> high_error_analysis(const AttributionResult& a,
                                                                         double quantile = 0.10) {
    const std::size_t n = a.rows.size();
    if (n < 10) throw ValidationError("high-error analysis needs at least 10 hours");
    if (!(quantile > 0.0 && quantile <= 0.5)) throw ValidationError("quantile must be in (0, 0.5]");
    const auto k = static_cast<std::size_t>(std::ceil(quantile * static_cast<double>(n) - 1e-9));
    const std::size_t nb = a.buses.size();

    std::vector<double> mae_all(nb, 0.0);
    for (const auto& r : a.residuals) {
        for (std::size_t i = 0; i < nb; ++i) mae_all[i] += std::abs(r[i]);
    }
    double mae_total = 0.0;
    for (double& m : mae_all) {
        m /= static_cast<double>(n);
        mae_total += m;
    }

    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    // rows are in ascending timestamp, so stable sorts break ties by timestamp
    std::vector<std::size_t> desc = idx;
    std::stable_sort(desc.begin(), desc.end(),
                     [&](std::size_t x, std::size_t y) { return a.rows[x].utility_residual > a.rows[y].utility_residual; });
    std::vector<std::size_t> pos_sel(desc.begin(), desc.begin() + static_cast<std::ptrdiff_t>(k));
    std::vector<bool> taken(n, false);
    for (std::size_t i : pos_sel) taken[i] = true;
    std::vector<std::size_t> asc;
    for (std::size_t i : idx) {
        if (!taken[i]) asc.push_back(i);
    }
    std::stable_sort(asc.begin(), asc.end(),
                     [&](std::size_t x, std::size_t y) { return a.rows[x].utility_residual < a.rows[y].utility_residual; });
    std::vector<std::size_t> neg_sel(asc.begin(), asc.begin() + static_cast<std::ptrdiff_t>(k));

    auto profile = [&](Direction d, std::vector<std::size_t> sel) {
        std::sort(sel.begin(), sel.end());
        HighErrorProfile p;
        p.direction = d;
        double su = 0.0, sau = 0.0;
        for (std::size_t r : sel) {
            p.selected.push_back(a.rows[r].timestamp);
            su += a.rows[r].utility_residual;
            sau += std::abs(a.rows[r].utility_residual);
        }
        const double dk = static_cast<double>(sel.size());
        p.mean_utility_residual = su / dk;
        p.mean_abs_utility_residual = sau / dk;
        if (p.mean_utility_residual == 0.0 || p.mean_abs_utility_residual == 0.0) {
            throw ValidationError("mean utility residual over the " + to_string(d) + " selection is zero");
        }
        for (std::size_t i = 0; i < nb; ++i) {
            double sb = 0.0, sab = 0.0;
            for (std::size_t r : sel) {
                sb += a.residuals[r][i];
                sab += std::abs(a.residuals[r][i]);
            }
            BusShare b;
            b.bus = a.buses[i];
            b.bias_share = (sb / dk) / p.mean_utility_residual;
            b.mae_share = (sab / dk) / p.mean_abs_utility_residual;
            b.overall_mae_share = mae_total > 0.0 ? mae_all[i] / mae_total : 0.0;
            b.overall_load_share = a.load_share[i];
            p.buses.push_back(b);
        }
        return p;
    };
    return {profile(Direction::Positive, pos_sel), profile(Direction::Negative, neg_sel)};
}

}  // namespace gridcast::diagnose

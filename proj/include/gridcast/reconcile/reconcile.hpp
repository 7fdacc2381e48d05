#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <vector>

#include "gridcast/core/error.hpp"
#include "gridcast/core/forecast.hpp"
#include "gridcast/core/types.hpp"

namespace gridcast::reconcile {

namespace detail {

/// Splits `v` into shares proportional to `p` such that the parts sum back to
/// `v` exactly in any summation order. Every part is an integer multiple of
/// ulp(v); the integer units are apportioned by largest remainder.
inline std::vector<double> apportion(double v, const std::vector<double>& p) {
    const std::size_t n = p.size();
    std::vector<double> out(n, 0.0);
    if (v == 0.0 || !std::isfinite(v)) {
        for (std::size_t i = 0; i < n; ++i) out[i] = p[i] * v;
        return out;
    }
    int exp = 0;
    std::frexp(v, &exp);  // |v| in [2^(exp-1), 2^exp)
    const double quantum = std::ldexp(1.0, exp - 53);
    const double units = v / quantum;  // exact integer, |units| < 2^53
    const double mag = std::abs(units);
    const double total = std::accumulate(p.begin(), p.end(), 0.0);
    if (!(total > 0.0)) throw ValidationError("proportions must have a positive sum");
    std::vector<double> whole(n), frac(n);
    double assigned = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double share = p[i] / total * mag;
        whole[i] = std::floor(share);
        frac[i] = share - whole[i];
        assigned += whole[i];
    }
    auto left = static_cast<std::int64_t>(mag - assigned);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return frac[a] > frac[b]; });
    // Rounding in p / total leaves a handful of units either way.
    for (std::size_t r = 0; left > 0; r = (r + 1) % n) {
        if (p[order[r]] > 0.0) {
            whole[order[r]] += 1.0;
            --left;
        }
    }
    for (std::size_t r = 0; left < 0; r = (r + 1) % n) {
        if (whole[order[n - 1 - r]] > 0.0) {
            whole[order[n - 1 - r]] -= 1.0;
            ++left;
        }
    }
    const double sign = units < 0.0 ? -1.0 : 1.0;
    for (std::size_t i = 0; i < n; ++i) out[i] = sign * whole[i] * quantum;
    return out;
}

inline void check_aligned(const ForecastBundle& a, const ForecastBundle& b) {
    if (a.origin != b.origin) throw ValidationError("bus forecasts have different origins");
    if (a.step_offset != b.step_offset || a.length() != b.length() || a.quantiles != b.quantiles) {
        throw ValidationError("bus forecasts have different shapes");
    }
}

}  // namespace detail

/// Splits a utility forecast into bus forecasts by historical proportions.
/// Values are apportioned so each hour's bus values sum to the utility value
/// exactly; components are scaled by the normalized proportion.
inline std::vector<ForecastBundle> top_down(const ForecastBundle& utility, const Hierarchy& h) {
    if (utility.series != h.utility) throw NotFound("series " + utility.series.id + " is not the hierarchy utility");
    std::vector<double> p;
    p.reserve(h.buses.size());
    for (const auto& b : h.buses) p.push_back(h.proportions.at(b.id));
    const double total = std::accumulate(p.begin(), p.end(), 0.0);
    if (!(total > 0.0)) throw ValidationError("proportions must have a positive sum");

    std::vector<ForecastBundle> out(h.buses.size());
    for (std::size_t i = 0; i < h.buses.size(); ++i) {
        ForecastBundle& fb = out[i];
        fb = utility;
        fb.series = h.buses[i];
        fb.reconciliation = "top_down";
        for (auto& [name, comp] : fb.components) {
            for (double& c : comp) c *= p[i] / total;
        }
    }
    for (std::size_t q = 0; q < utility.values.size(); ++q) {
        for (std::size_t t = 0; t < utility.values[q].size(); ++t) {
            const auto parts = detail::apportion(utility.values[q][t], p);
            for (std::size_t i = 0; i < out.size(); ++i) out[i].values[q][t] = parts[i];
        }
    }
    return out;
}

/// Sums bus forecasts (every quantile and component) into the utility forecast.
/// Summed quantiles are not quantiles of the sum; the bundle is marked
/// `interval_method = summed`.
inline ForecastBundle bottom_up(const std::vector<ForecastBundle>& buses, const Hierarchy& h) {
    std::map<std::string, const ForecastBundle*> by_id;
    for (const auto& b : buses) by_id[b.series.id] = &b;
    std::vector<const ForecastBundle*> ordered;
    for (const auto& id : h.buses) {
        auto it = by_id.find(id.id);
        if (it == by_id.end()) throw NotFound("missing forecast for bus " + id.id);
        ordered.push_back(it->second);
    }
    if (ordered.empty()) throw ValidationError("hierarchy has no buses");
    const ForecastBundle& first = *ordered.front();
    for (const auto* b : ordered) detail::check_aligned(first, *b);

    ForecastBundle out;
    out.series = h.utility;
    out.origin = first.origin;
    out.model = first.model;
    out.step_offset = first.step_offset;
    out.quantiles = first.quantiles;
    out.reconciliation = "bottom_up";
    out.interval_method = ordered.size() == 1 ? first.interval_method : "summed";
    out.values.assign(first.values.size(), std::vector<double>(first.length(), 0.0));
    bool all_components = true;
    for (const auto* b : ordered) all_components = all_components && !b->components.empty();
    if (all_components) {
        for (const auto& n : component_names()) out.components[n].assign(first.length(), 0.0);
    }
    for (const auto* b : ordered) {
        for (std::size_t q = 0; q < out.values.size(); ++q) {
            for (std::size_t t = 0; t < out.length(); ++t) out.values[q][t] += b->values[q][t];
        }
        if (all_components) {
            for (auto& [name, acc] : out.components) {
                auto it = b->components.find(name);
                if (it == b->components.end()) continue;
                for (std::size_t t = 0; t < acc.size(); ++t) acc[t] += it->second[t];
            }
        }
    }
    return out;
}

/// Scales an aggregated bus forecast by the utility/bus-sum magnitude ratio.
inline ForecastBundle scale_to_utility(const ForecastBundle& agg, const Hierarchy& h) {
    ForecastBundle out = agg;
    out.series = h.utility;
    for (auto& row : out.values) {
        for (double& v : row) v *= h.agg_scale;
    }
    for (auto& [name, comp] : out.components) {
        for (double& c : comp) c *= h.agg_scale;
    }
    out.reconciliation = "bottom_up_scaled";
    if (out.interval_method == "model") out.interval_method = "scaled";
    return out;
}

}  // namespace gridcast::reconcile

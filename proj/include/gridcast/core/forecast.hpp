#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "gridcast/core/error.hpp"
#include "gridcast/core/time.hpp"
#include "gridcast/core/types.hpp"

namespace gridcast {

inline const std::vector<std::string>& component_names() {
    static const std::vector<std::string> names = {"trend", "seasonality", "events", "autoregression",
                                                   "temperature"};
    return names;
}

inline bool is_component_name(const std::string& s) {
    for (const auto& n : component_names()) {
        if (n == s) return true;
    }
    return false;
}

/// Forecast from one origin for one series. `values[q][i]` is the quantile
/// `quantiles[q]` forecast for hour `origin + step_offset + i`. Components,
/// when present, decompose the median row and share its length.
struct ForecastBundle {
    SeriesId series;
    Timestamp origin;
    std::string model = "hitsgam";
    std::size_t step_offset = 1;
    std::vector<double> quantiles = {0.5};
    std::vector<std::vector<double>> values;
    std::map<std::string, std::vector<double>> components;
    std::string reconciliation = "none";   // none | top_down | bottom_up | bottom_up_scaled
    std::string interval_method = "model";  // model | summed | scaled

    std::size_t length() const { return values.empty() ? 0 : values.front().size(); }

    std::size_t median_index() const {
        for (std::size_t i = 0; i < quantiles.size(); ++i) {
            if (quantiles[i] == 0.5) return i;
        }
        throw ModelError("bundle has no median quantile");
    }

    const std::vector<double>& median() const { return values[median_index()]; }

    std::size_t quantile_index(double q) const {
        for (std::size_t i = 0; i < quantiles.size(); ++i) {
            if (quantiles[i] == q) return i;
        }
        throw NotFound("bundle has no quantile " + std::to_string(q));
    }

    Timestamp hour(std::size_t i) const { return origin + static_cast<std::int64_t>(step_offset + i); }

    /// Largest |median - sum of components| over hours; 0 when no components.
    double additivity_gap() const {
        if (components.empty()) return 0.0;
        const auto& med = median();
        double worst = 0.0;
        for (std::size_t i = 0; i < med.size(); ++i) {
            double s = 0.0;
            for (const auto& n : component_names()) {
                auto it = components.find(n);
                if (it != components.end()) s += it->second[i];
            }
            worst = std::max(worst, std::abs(med[i] - s));
        }
        return worst;
    }
};

}  // namespace gridcast

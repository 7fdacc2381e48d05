#pragma once

#include <algorithm>
#include <numeric>
#include <string>
#include <vector>

#include "gridcast/core/error.hpp"
#include "gridcast/core/types.hpp"
#include "gridcast/eval/evaluate.hpp"
#include "gridcast/features/features.hpp"

namespace gridcast::diagnose {

struct Quartiles {
    double q1 = 0.0, median = 0.0, q3 = 0.0;
    double iqr() const { return q3 - q1; }
};

struct FeatureComparison {
    std::string feature;
    Quartiles all, worst;
    // Quartiles centred on the all-bus median and divided by the all-bus IQR.
    // A zero all-bus IQR leaves values unscaled and sets `degenerate`.
    Quartiles all_scaled, worst_scaled;
    bool degenerate = false;
    double scaled_all_iqr() const { return all_scaled.iqr(); }
    double scaled_worst_iqr() const { return worst_scaled.iqr(); }
};

struct FeatureProfile {
    std::vector<SeriesId> worst;  // by MAE, descending
    std::vector<FeatureComparison> rows;
};

inline Quartiles quartiles_of(const std::vector<double>& v) {
    return {eval::sample_quantile(v, 0.25), eval::sample_quantile(v, 0.5), eval::sample_quantile(v, 0.75)};
}

/// Compares feature quartiles of the `worst_n` least accurate buses with all buses.
inline FeatureProfile feature_error_profile(const std::vector<SeriesId>& ids,
                                            const std::vector<features::FeatureVector>& feats,
                                            const std::vector<double>& mae, std::size_t worst_n = 10) {
    const std::size_t n = ids.size();
    if (feats.size() != n || mae.size() != n) throw ValidationError("feature profile inputs differ in length");
    if (worst_n == 0 || n < worst_n) throw ValidationError("fewer buses than worst_n");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (mae[a] != mae[b]) return mae[a] > mae[b];
        return ids[a].id < ids[b].id;
    });
    order.resize(worst_n);

    FeatureProfile out;
    for (std::size_t i : order) out.worst.push_back(ids[i]);
    const auto& names = features::FeatureVector::names();
    for (std::size_t f = 0; f < names.size(); ++f) {
        std::vector<double> all, worst;
        for (std::size_t i = 0; i < n; ++i) all.push_back(feats[i].to_array()[f]);
        for (std::size_t i : order) worst.push_back(feats[i].to_array()[f]);
        FeatureComparison row;
        row.feature = names[f];
        row.all = quartiles_of(all);
        row.worst = quartiles_of(worst);
        const double scale = row.all.iqr();
        row.degenerate = !(scale > 0.0);
        auto rescale = [&](const Quartiles& q) {
            if (row.degenerate) return q;
            return Quartiles{(q.q1 - row.all.median) / scale, (q.median - row.all.median) / scale,
                             (q.q3 - row.all.median) / scale};
        };
        row.all_scaled = rescale(row.all);
        row.worst_scaled = rescale(row.worst);
        out.rows.push_back(row);
    }
    return out;
}

}  // namespace gridcast::diagnose

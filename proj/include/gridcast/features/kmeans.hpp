#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "gridcast/core/error.hpp"
#include "gridcast/core/rng.hpp"
#include "gridcast/core/types.hpp"
#include "gridcast/features/features.hpp"

namespace gridcast::features {

using Point = std::vector<double>;

struct KMeansResult {
    std::vector<std::size_t> labels;
    std::vector<Point> centroids;
    double inertia = 0.0;
    std::vector<double> inertia_history;  // after each assignment step
    std::size_t iterations = 0;
};

struct KMeansOptions {
    std::size_t max_iterations = 300;
    double tolerance = 1e-6;
};

namespace detail {

inline double sq_dist(const Point& a, const Point& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return s;
}

inline std::size_t nearest(const Point& p, const std::vector<Point>& centres) {
    std::size_t best = 0;
    double bd = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < centres.size(); ++c) {
        const double d = sq_dist(p, centres[c]);
        if (d < bd) {
            bd = d;
            best = c;
        }
    }
    return best;
}

}  // namespace detail

inline double inertia(const std::vector<Point>& pts, const std::vector<std::size_t>& labels,
                      const std::vector<Point>& centres) {
    double s = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) s += detail::sq_dist(pts[i], centres[labels[i]]);
    return s;
}

/// Lloyd iteration seeded with a greedy farthest-point initialization: the
/// first centre is a seeded random point, each further centre the point
/// farthest from all chosen centres (lowest index on ties). An emptied
/// cluster takes the point farthest from its current centroid.
inline KMeansResult kmeans(const std::vector<Point>& pts, std::size_t k, std::uint64_t seed,
                           const KMeansOptions& opt = {}) {
    const std::size_t n = pts.size();
    if (k == 0) throw DataError("k must be at least 1");
    if (n < k) throw DataError("fewer series than clusters");

    Rng rng(seed);
    std::vector<Point> centres;
    centres.push_back(pts[static_cast<std::size_t>(rng.below(n))]);
    std::vector<double> mind(n, std::numeric_limits<double>::infinity());
    while (centres.size() < k) {
        std::size_t far = 0;
        double fd = -1.0;
        for (std::size_t i = 0; i < n; ++i) {
            mind[i] = std::min(mind[i], detail::sq_dist(pts[i], centres.back()));
            if (mind[i] > fd) {
                fd = mind[i];
                far = i;
            }
        }
        centres.push_back(pts[far]);
    }

    KMeansResult r;
    r.labels.assign(n, 0);
    const std::size_t dim = pts.front().size();
    for (std::size_t it = 0; it < opt.max_iterations; ++it) {
        for (std::size_t i = 0; i < n; ++i) r.labels[i] = detail::nearest(pts[i], centres);

        std::vector<std::size_t> count(k, 0);
        for (auto l : r.labels) ++count[l];
        for (std::size_t c = 0; c < k; ++c) {
            if (count[c] != 0) continue;
            std::size_t far = n;
            double fd = -1.0;
            for (std::size_t i = 0; i < n; ++i) {
                if (count[r.labels[i]] <= 1) continue;
                const double d = detail::sq_dist(pts[i], centres[r.labels[i]]);
                if (d > fd) {
                    fd = d;
                    far = i;
                }
            }
            --count[r.labels[far]];
            r.labels[far] = c;
            count[c] = 1;
            centres[c] = pts[far];
        }
        r.inertia_history.push_back(inertia(pts, r.labels, centres));

        std::vector<Point> next(k, Point(dim, 0.0));
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < dim; ++j) next[r.labels[i]][j] += pts[i][j];
        }
        double moved = 0.0;
        for (std::size_t c = 0; c < k; ++c) {
            for (double& v : next[c]) v /= static_cast<double>(count[c]);
            moved = std::max(moved, std::sqrt(detail::sq_dist(next[c], centres[c])));
        }
        centres = std::move(next);
        r.iterations = it + 1;
        if (moved < opt.tolerance) break;
    }
    // Final labels are nearest-centroid with respect to the returned centres.
    for (std::size_t i = 0; i < n; ++i) r.labels[i] = detail::nearest(pts[i], centres);
    r.centroids = std::move(centres);
    r.inertia = inertia(pts, r.labels, r.centroids);
    return r;
}

struct Standardization {
    std::vector<double> mean;
    std::vector<double> sd;  // 0 marks a constant dimension
};

/// Column z-scores across series. Constant columns map to 0.
inline std::vector<Point> standardize(const std::vector<Point>& rows, Standardization* out = nullptr) {
    Standardization st;
    const std::size_t n = rows.size(), dim = rows.empty() ? 0 : rows.front().size();
    st.mean.assign(dim, 0.0);
    st.sd.assign(dim, 0.0);
    for (const auto& r : rows) {
        for (std::size_t j = 0; j < dim; ++j) st.mean[j] += r[j];
    }
    for (double& m : st.mean) m /= static_cast<double>(n);
    for (const auto& r : rows) {
        for (std::size_t j = 0; j < dim; ++j) st.sd[j] += (r[j] - st.mean[j]) * (r[j] - st.mean[j]);
    }
    for (double& s : st.sd) s = n > 1 ? std::sqrt(s / static_cast<double>(n - 1)) : 0.0;

    std::vector<Point> z(rows);
    for (auto& r : z) {
        for (std::size_t j = 0; j < dim; ++j) r[j] = st.sd[j] > 0.0 ? (r[j] - st.mean[j]) / st.sd[j] : 0.0;
    }
    if (out) *out = std::move(st);
    return z;
}

struct GroupAssignment {
    std::map<std::string, std::size_t> groups;
    std::vector<Point> centroids;  // standardized feature space
    Standardization scaling;
    std::uint64_t seed = 42;
    double inertia = 0.0;
    std::size_t iterations = 0;

    std::size_t k() const { return centroids.size(); }
};

inline GroupAssignment cluster_kmeans(const std::vector<SeriesId>& ids, const std::vector<FeatureVector>& features,
                                      std::size_t k = 3, std::uint64_t seed = 42) {
    if (ids.size() != features.size()) throw DataError("ids and features differ in length");
    std::vector<Point> rows;
    rows.reserve(features.size());
    for (const auto& f : features) {
        auto a = f.to_array();
        rows.emplace_back(a.begin(), a.end());
    }
    GroupAssignment g;
    auto z = standardize(rows, &g.scaling);
    auto r = kmeans(z, k, seed);
    for (std::size_t i = 0; i < ids.size(); ++i) g.groups[ids[i].id] = r.labels[i];
    g.centroids = std::move(r.centroids);
    g.seed = seed;
    g.inertia = r.inertia;
    g.iterations = r.iterations;
    return g;
}

/// Agreement of two partitions, corrected for chance (1 = identical up to
/// relabeling).
inline double adjusted_rand_index(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
    if (a.size() != b.size()) throw DataError("partitions differ in length");
    std::map<std::pair<std::size_t, std::size_t>, double> joint;
    std::map<std::size_t, double> ca, cb;
    for (std::size_t i = 0; i < a.size(); ++i) {
        joint[{a[i], b[i]}] += 1.0;
        ca[a[i]] += 1.0;
        cb[b[i]] += 1.0;
    }
    auto c2 = [](double x) { return x * (x - 1.0) / 2.0; };
    double sj = 0.0, sa = 0.0, sb = 0.0;
    for (const auto& [_, v] : joint) sj += c2(v);
    for (const auto& [_, v] : ca) sa += c2(v);
    for (const auto& [_, v] : cb) sb += c2(v);
    const double total = c2(static_cast<double>(a.size()));
    const double expected = sa * sb / total;
    const double maxi = (sa + sb) / 2.0;
    if (maxi == expected) return 1.0;
    return (sj - expected) / (maxi - expected);
}

}  // namespace gridcast::features

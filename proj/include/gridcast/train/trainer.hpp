#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <future>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gridcast/core/error.hpp"
#include "gridcast/core/rng.hpp"
#include "gridcast/core/types.hpp"
#include "gridcast/features/kmeans.hpp"
#include "gridcast/model/config.hpp"
#include "gridcast/model/hitsgam.hpp"
#include "gridcast/model/params.hpp"
#include "gridcast/train/adam.hpp"

namespace gridcast::train {

using model::HitsGamConfig;
using model::HitsGamParams;

/// Explicit form of one rolling-window sample, for inspection and tests.
/// The training loop works on `model::SampleRef` and reads windows in place.
struct TrainingSample {
    SeriesId series;
    Timestamp origin;  // last observed hour
    std::vector<double> lags;         // scaled load, oldest first
    std::vector<double> targets;      // scaled load
    std::vector<double> future_temps;  // scaled
    double weight = 1.0;
};

/// Linear recency ramp from 1 (oldest origin) to `newest` (newest origin).
inline double recency_weight(std::size_t i, std::size_t count, double newest) {
    if (count <= 1) return newest;
    return 1.0 + (newest - 1.0) * static_cast<double>(i) / static_cast<double>(count - 1);
}

/// One sample per hourly origin: targets t in [n_lags, n - horizon].
inline std::vector<model::SampleRef> sample_plan(std::size_t n, const HitsGamConfig& cfg, std::uint32_t series = 0) {
    if (n < cfg.n_lags + cfg.horizon) throw DataError("series too short to build training samples");
    const std::size_t count = n - cfg.n_lags - cfg.horizon + 1;
    std::vector<model::SampleRef> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        out.push_back({series, static_cast<std::uint32_t>(cfg.n_lags + i),
                       recency_weight(i, count, cfg.newer_samples_weight)});
    }
    return out;
}

inline model::Scaler fit_scaler(const std::vector<double>& v) {
    model::Scaler s;
    s.mean = stats::mean(v);
    s.sd = std::sqrt(stats::variance(v, 0));
    return s;
}

/// Parameter bank for a training pool: per-series scalers and trend clocks,
/// pooled temperature scaler, Glorot-initialized nets, zero local banks.
/// `fit_bank` may warm-start the local banks afterwards.
inline HitsGamParams init_params(const std::vector<LoadSeries>& pool, const HitsGamConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    if (pool.empty()) throw ModelError("empty training pool");
    HitsGamParams p;
    p.config = cfg;
    p.seed = seed;
    std::vector<double> temps;
    for (const auto& s : pool) {
        for (double x : s.load) {
            if (is_missing(x)) throw ModelError("series '" + s.series.id + "' is not cleaned");
        }
        model::SeriesMeta m;
        m.id = s.series;
        m.clock = {s.start, s.size()};
        m.scaler = fit_scaler(s.load);
        if (!(m.scaler.sd > 0.0)) throw ModelError("series '" + s.series.id + "' has zero variance");
        p.series.push_back(m);
        temps.insert(temps.end(), s.temperature.begin(), s.temperature.end());
    }
    p.temperature_scaler = fit_scaler(temps);
    if (!(p.temperature_scaler.sd > 0.0)) p.temperature_scaler.sd = 1.0;
    p.allocate();
    Rng rng(seed);
    p.ar_net().initialize(p.theta.data() + p.ar_offset(), rng);
    p.temperature_net().initialize(p.theta.data() + p.temperature_offset(), rng);
    return p;
}

inline TrainingSample materialize(const HitsGamParams& p, const model::PreparedSeries& ps,
                                  const model::SampleRef& s) {
    TrainingSample out;
    out.series = p.series[ps.bank].id;
    out.origin = ps.start + static_cast<std::int64_t>(s.target) - 1;
    out.weight = s.weight;
    for (std::size_t i = s.target - p.config.n_lags; i < s.target; ++i) out.lags.push_back(ps.load(static_cast<Eigen::Index>(i)));
    for (std::size_t i = s.target; i < s.target + p.config.horizon; ++i) {
        out.targets.push_back(ps.load(static_cast<Eigen::Index>(i)));
        out.future_temps.push_back(ps.temperature(static_cast<Eigen::Index>(i)));
    }
    return out;
}

/// Explicit samples for one training series.
inline std::vector<TrainingSample> build_samples(const LoadSeries& train, const HitsGamConfig& cfg) {
    const auto p = init_params({train}, cfg, 0);
    const auto ps = model::prepare(p, 0, train);
    std::vector<TrainingSample> out;
    for (const auto& s : sample_plan(train.size(), cfg)) out.push_back(materialize(p, ps, s));
    return out;
}

/// Ridge-stabilized least-squares fit of the local design to the scaled
/// load, written into the series' local bank. Columns that never fire in
/// training (holidays outside the window) stay at zero.
inline void warm_start_local(HitsGamParams& p, const model::PreparedSeries& ps) {
    const auto& X = ps.design;
    const Eigen::MatrixXd gram = X.transpose() * X;
    const double ridge = 1e-8 * static_cast<double>(X.rows());
    const Eigen::MatrixXd a = gram + ridge * Eigen::MatrixXd::Identity(gram.rows(), gram.cols());
    const Eigen::VectorXd beta = a.ldlt().solve(X.transpose() * ps.load);
    std::copy(beta.data(), beta.data() + beta.size(), p.local(ps.bank));
}

struct TrainingHistory {
    std::vector<double> epoch_loss;  // mean weighted pinball loss per epoch
};

struct FittedBank {
    HitsGamParams params;
    TrainingHistory history;
};

/// Mini-batch training of one bank on its pool (all series share the
/// global nets).
inline FittedBank fit_bank(const std::vector<LoadSeries>& pool, const HitsGamConfig& cfg, std::uint64_t seed) {
    FittedBank fb;
    fb.params = init_params(pool, cfg, seed);
    auto& p = fb.params;
    std::vector<model::PreparedSeries> prepared;
    std::vector<model::SampleRef> samples;
    for (std::size_t i = 0; i < pool.size(); ++i) {
        prepared.push_back(model::prepare(p, i, pool[i]));
        if (cfg.warm_start_local) warm_start_local(p, prepared.back());
        auto plan = sample_plan(pool[i].size(), cfg, static_cast<std::uint32_t>(i));
        samples.insert(samples.end(), plan.begin(), plan.end());
    }

    Rng rng(seed ^ 0x9e3779b97f4a7c15ULL);
    Adam opt(p.theta.size(), cfg.learning_rate, cfg.adam_beta1, cfg.adam_beta2, cfg.adam_epsilon);
    Eigen::VectorXd grad(p.theta.size());
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        rng.shuffle(samples);
        double total = 0.0;
        for (std::size_t a = 0; a < samples.size(); a += cfg.batch_size) {
            const std::size_t n = std::min(cfg.batch_size, samples.size() - a);
            const std::span<const model::SampleRef> batch(samples.data() + a, n);
            const double loss = model::batch_loss(p, prepared, batch, &grad);
            total += loss * static_cast<double>(n);
            opt.step(p.theta, grad);
        }
        const double mean = total / static_cast<double>(samples.size());
        if (!std::isfinite(mean)) throw ModelError("training diverged (non-finite loss)");
        fb.history.epoch_loss.push_back(mean);
    }
    return fb;
}

enum class PoolingMode { Local, Global, GroupedGlobal };

inline std::string to_string(PoolingMode m) {
    switch (m) {
        case PoolingMode::Local: return "local";
        case PoolingMode::Global: return "global";
        case PoolingMode::GroupedGlobal: return "grouped";
    }
    return "global";
}

inline PoolingMode parse_pooling_mode(const std::string& s) {
    if (s == "local") return PoolingMode::Local;
    if (s == "global") return PoolingMode::Global;
    if (s == "grouped") return PoolingMode::GroupedGlobal;
    throw ValidationError("unknown pooling mode '" + s + "'");
}

struct PoolingSpec {
    PoolingMode mode = PoolingMode::Global;
    std::optional<features::GroupAssignment> groups;
};

/// Fitted banks plus the pooling mode that produced them.
struct ModelArtifact {
    PoolingMode mode = PoolingMode::Global;
    std::vector<FittedBank> banks;

    const HitsGamParams& bank_for(const std::string& id) const {
        for (const auto& b : banks) {
            if (b.params.covers(id)) return b.params;
        }
        throw NotFound("no fitted bank covers series '" + id + "'");
    }
};

/// Trains on the train splits in `pool`. Local fits one bank per series,
/// Global one bank for all, GroupedGlobal one Global fit per group (groups
/// in ascending index, members in pool order). Every fit uses `seed`.
inline ModelArtifact fit(const std::vector<LoadSeries>& pool, const PoolingSpec& spec, const HitsGamConfig& cfg,
                         std::uint64_t seed, bool parallel = false) {
    if (pool.empty()) throw ModelError("empty training pool");
    std::vector<std::vector<LoadSeries>> parts;
    switch (spec.mode) {
        case PoolingMode::Local:
            for (const auto& s : pool) parts.push_back({s});
            break;
        case PoolingMode::Global:
            parts.push_back(pool);
            break;
        case PoolingMode::GroupedGlobal: {
            if (!spec.groups) throw ModelError("grouped pooling requires a group assignment");
            std::map<std::size_t, std::vector<LoadSeries>> by_group;
            for (const auto& s : pool) {
                auto it = spec.groups->groups.find(s.series.id);
                if (it == spec.groups->groups.end()) {
                    throw ModelError("series '" + s.series.id + "' has no group assignment");
                }
                by_group[it->second].push_back(s);
            }
            for (auto& [_, members] : by_group) parts.push_back(std::move(members));
            break;
        }
    }

    ModelArtifact art;
    art.mode = spec.mode;
    if (parallel && parts.size() > 1) {
        std::vector<std::future<FittedBank>> jobs;
        for (const auto& part : parts) {
            jobs.push_back(std::async(std::launch::async, [&part, &cfg, seed] { return fit_bank(part, cfg, seed); }));
        }
        for (auto& j : jobs) art.banks.push_back(j.get());
    } else {
        for (const auto& part : parts) art.banks.push_back(fit_bank(part, cfg, seed));
    }
    return art;
}

}  // namespace gridcast::train

#pragma once

#include <span>
#include <string>
#include <vector>

#include "gridcast/baselines/knn.hpp"
#include "gridcast/baselines/snaive.hpp"
#include "gridcast/core/error.hpp"
#include "gridcast/eval/evaluate.hpp"
#include "gridcast/model/hitsgam.hpp"
#include "gridcast/train/trainer.hpp"

namespace gridcast::pipeline {

/// Temperatures for the `n` hours after `origin`, taken from the series
/// (which carries forecast temperatures for future hours).
inline std::vector<double> future_temperatures(const LoadSeries& s, Timestamp origin, std::size_t n) {
    if (!s.contains(origin + 1) || !s.contains(origin + static_cast<std::int64_t>(n))) {
        throw ModelError("no temperature forecast for the horizon of " + s.series.id);
    }
    const std::size_t a = s.index_of(origin + 1);
    return {s.temperature.begin() + static_cast<std::ptrdiff_t>(a),
            s.temperature.begin() + static_cast<std::ptrdiff_t>(a + n)};
}

inline ForecastBundle hitsgam_forecast(const train::ModelArtifact& art, const LoadSeries& s, Timestamp origin) {
    const auto& p = art.bank_for(s.series.id);
    const auto temps = future_temperatures(s, origin, p.config.horizon);
    return model::forecast(p, s.series.id, origin, s, temps);
}

inline ForecastBundle knn_for(const LoadSeries& train, const LoadSeries& s, Timestamp origin,
                              const baselines::KnnConfig& cfg = {}) {
    const std::size_t lead = baselines::steps_to_next_day(origin);
    const auto temps = future_temperatures(s, origin, lead + 24);
    return baselines::knn_forecast(train, s, origin, std::span<const double>(temps).subspan(lead, 24), cfg);
}

/// Forecasts of one kind for every series at every origin.
enum class ModelKind { HitsGam, SNaive, Knn };

inline ModelKind parse_model_kind(const std::string& s) {
    if (s == "hitsgam") return ModelKind::HitsGam;
    if (s == "snaive") return ModelKind::SNaive;
    if (s == "knn") return ModelKind::Knn;
    throw ValidationError("unknown model '" + s + "'");
}

}  // namespace gridcast::pipeline

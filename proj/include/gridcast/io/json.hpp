#pragma once

#include <fstream>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "gridcast/core/error.hpp"
#include "gridcast/core/forecast.hpp"
#include "gridcast/core/types.hpp"
#include "gridcast/data/clean.hpp"
#include "gridcast/diagnose/attribution.hpp"
#include "gridcast/diagnose/feature_profile.hpp"
#include "gridcast/eval/evaluate.hpp"
#include "gridcast/features/features.hpp"
#include "gridcast/features/kmeans.hpp"
#include "gridcast/model/params.hpp"
#include "gridcast/synth/generate.hpp"
#include "gridcast/train/trainer.hpp"

namespace gridcast::io {

using json = nlohmann::json;

inline json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw DataError(path + ": " + e.what());
    }
}

inline void write_json_file(const std::string& path, const json& j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path);
    out << j.dump(2) << '\n';
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
    auto it = j.find(key);
    return it == j.end() || it->is_null() ? fallback : it->get<T>();
}

// ---- core -------------------------------------------------------------------

inline json encode(const SeriesId& s) { return {{"id", s.id}, {"level", to_string(s.level)}}; }

inline SeriesId decode_series_id(const json& j) { return {j.at("id").get<std::string>(), parse_level(j.at("level"))}; }

inline json encode(Timestamp t) { return format_timestamp(t); }

inline Timestamp decode_timestamp(const json& j) { return parse_timestamp(j.get<std::string>()); }

inline json encode(const ForecastBundle& b) {
    json comps = json::object();
    for (const auto& [name, v] : b.components) comps[name] = v;
    return {{"series", encode(b.series)},
            {"origin", encode(b.origin)},
            {"model", b.model},
            {"step_offset", b.step_offset},
            {"quantiles", b.quantiles},
            {"values", b.values},
            {"components", comps},
            {"reconciliation", b.reconciliation},
            {"interval_method", b.interval_method}};
}

inline ForecastBundle decode_bundle(const json& j) {
    try {
        ForecastBundle b;
        b.series = decode_series_id(j.at("series"));
        b.origin = decode_timestamp(j.at("origin"));
        b.model = j.at("model").get<std::string>();
        b.step_offset = j.at("step_offset").get<std::size_t>();
        b.quantiles = j.at("quantiles").get<std::vector<double>>();
        b.values = j.at("values").get<std::vector<std::vector<double>>>();
        if (j.contains("components")) {
            for (const auto& [name, v] : j.at("components").items()) {
                if (!is_component_name(name)) throw ValidationError("unknown component " + name);
                b.components[name] = v.get<std::vector<double>>();
            }
        }
        b.reconciliation = get_or<std::string>(j, "reconciliation", "none");
        b.interval_method = get_or<std::string>(j, "interval_method", "model");
        if (b.values.size() != b.quantiles.size()) throw ValidationError("values and quantiles differ in count");
        for (const auto& row : b.values) {
            if (row.size() != b.length()) throw ValidationError("ragged forecast values");
        }
        for (const auto& [_, v] : b.components) {
            if (v.size() != b.length()) throw ValidationError("component length differs from forecast");
        }
        return b;
    } catch (const json::exception& e) {
        throw ValidationError(std::string("malformed forecast bundle: ") + e.what());
    }
}

inline json encode(const Hierarchy& h) {
    json buses = json::array();
    for (const auto& b : h.buses) buses.push_back(b.id);
    return {{"utility", h.utility.id}, {"buses", buses}, {"proportions", h.proportions}, {"agg_scale", h.agg_scale}};
}

// ---- data -------------------------------------------------------------------

inline json encode(const data::CleaningReport& r) {
    return {{"series", encode(r.series)},
            {"outliers_replaced", r.outliers_replaced},
            {"linear_imputed", r.linear_imputed},
            {"edge_imputed", r.edge_imputed},
            {"rolling_imputed", r.rolling_imputed},
            {"global_mean_imputed", r.global_mean_imputed},
            {"temperature_imputed", r.temperature_imputed}};
}

inline json encode(const data::DroppedSeries& d) { return {{"series", encode(d.series)}, {"reasons", d.reasons}}; }

// ---- features ---------------------------------------------------------------

inline json encode(const features::FeatureVector& f) {
    json j = json::object();
    const auto a = f.to_array();
    for (std::size_t i = 0; i < a.size(); ++i) j[features::FeatureVector::names()[i]] = a[i];
    return j;
}

inline json encode(const features::GroupAssignment& g) {
    return {{"groups", g.groups},
            {"centroids", g.centroids},
            {"scaling", {{"mean", g.scaling.mean}, {"sd", g.scaling.sd}}},
            {"seed", g.seed},
            {"inertia", g.inertia},
            {"iterations", g.iterations},
            {"features", features::FeatureVector::names()}};
}

inline features::GroupAssignment decode_groups(const json& j) {
    features::GroupAssignment g;
    g.groups = j.at("groups").get<std::map<std::string, std::size_t>>();
    g.centroids = get_or<std::vector<features::Point>>(j, "centroids", {});
    if (j.contains("scaling")) {
        g.scaling.mean = j["scaling"].at("mean").get<std::vector<double>>();
        g.scaling.sd = j["scaling"].at("sd").get<std::vector<double>>();
    }
    g.seed = get_or<std::uint64_t>(j, "seed", 42);
    g.inertia = get_or<double>(j, "inertia", 0.0);
    g.iterations = get_or<std::size_t>(j, "iterations", 0);
    return g;
}

// ---- model ------------------------------------------------------------------

inline json encode(const model::HitsGamConfig& c) {
    return {{"n_lags", c.n_lags},
            {"horizon", c.horizon},
            {"quantiles", c.quantiles},
            {"yearly_order", c.yearly_order},
            {"weekly_order", c.weekly_order},
            {"daily_order", c.daily_order},
            {"summer_first_month", c.summer_first_month},
            {"summer_last_month", c.summer_last_month},
            {"n_changepoints", c.n_changepoints},
            {"ar_layers", c.ar_layers},
            {"lagged_reg_layers", c.lagged_reg_layers},
            {"batch_size", c.batch_size},
            {"learning_rate", c.learning_rate},
            {"epochs", c.epochs},
            {"newer_samples_weight", c.newer_samples_weight},
            {"warm_start_local", c.warm_start_local},
            {"adam_beta1", c.adam_beta1},
            {"adam_beta2", c.adam_beta2},
            {"adam_epsilon", c.adam_epsilon}};
}

/// Missing keys keep their defaults.
inline model::HitsGamConfig decode_config(const json& j) {
    model::HitsGamConfig c;
    c.n_lags = get_or(j, "n_lags", c.n_lags);
    c.horizon = get_or(j, "horizon", c.horizon);
    c.quantiles = get_or(j, "quantiles", c.quantiles);
    c.yearly_order = get_or(j, "yearly_order", c.yearly_order);
    c.weekly_order = get_or(j, "weekly_order", c.weekly_order);
    c.daily_order = get_or(j, "daily_order", c.daily_order);
    c.summer_first_month = get_or(j, "summer_first_month", c.summer_first_month);
    c.summer_last_month = get_or(j, "summer_last_month", c.summer_last_month);
    c.n_changepoints = get_or(j, "n_changepoints", c.n_changepoints);
    c.ar_layers = get_or(j, "ar_layers", c.ar_layers);
    c.lagged_reg_layers = get_or(j, "lagged_reg_layers", c.lagged_reg_layers);
    c.batch_size = get_or(j, "batch_size", c.batch_size);
    c.learning_rate = get_or(j, "learning_rate", c.learning_rate);
    c.epochs = get_or(j, "epochs", c.epochs);
    c.newer_samples_weight = get_or(j, "newer_samples_weight", c.newer_samples_weight);
    c.warm_start_local = get_or(j, "warm_start_local", c.warm_start_local);
    c.adam_beta1 = get_or(j, "adam_beta1", c.adam_beta1);
    c.adam_beta2 = get_or(j, "adam_beta2", c.adam_beta2);
    c.adam_epsilon = get_or(j, "adam_epsilon", c.adam_epsilon);
    c.validate();
    return c;
}

inline json encode(const model::HitsGamParams& p) {
    json series = json::array();
    for (const auto& s : p.series) {
        series.push_back({{"series", encode(s.id)},
                          {"clock_start", encode(s.clock.start)},
                          {"train_hours", s.clock.train_hours},
                          {"mean", s.scaler.mean},
                          {"sd", s.scaler.sd}});
    }
    return {{"config", encode(p.config)},
            {"seed", p.seed},
            {"event_names", p.event_names},
            {"series", series},
            {"temperature_scaler", {{"mean", p.temperature_scaler.mean}, {"sd", p.temperature_scaler.sd}}},
            {"theta", std::vector<double>(p.theta.data(), p.theta.data() + p.theta.size())}};
}

inline model::HitsGamParams decode_params(const json& j) {
    model::HitsGamParams p;
    p.config = decode_config(j.at("config"));
    p.seed = j.at("seed").get<std::uint64_t>();
    p.event_names = j.at("event_names").get<std::vector<std::string>>();
    for (const auto& s : j.at("series")) {
        model::SeriesMeta m;
        m.id = decode_series_id(s.at("series"));
        m.clock.start = decode_timestamp(s.at("clock_start"));
        m.clock.train_hours = s.at("train_hours").get<std::size_t>();
        m.scaler.mean = s.at("mean").get<double>();
        m.scaler.sd = s.at("sd").get<double>();
        p.series.push_back(m);
    }
    p.temperature_scaler.mean = j.at("temperature_scaler").at("mean").get<double>();
    p.temperature_scaler.sd = j.at("temperature_scaler").at("sd").get<double>();
    const auto theta = j.at("theta").get<std::vector<double>>();
    if (theta.size() != p.total_size()) throw ModelError("parameter vector length does not match the config");
    p.theta = Eigen::Map<const Eigen::VectorXd>(theta.data(), static_cast<Eigen::Index>(theta.size()));
    return p;
}

inline json encode(const train::ModelArtifact& a) {
    json banks = json::array();
    for (const auto& b : a.banks) banks.push_back({{"params", encode(b.params)}, {"epoch_loss", b.history.epoch_loss}});
    return {{"format", "gridcast-model/1"}, {"mode", train::to_string(a.mode)}, {"banks", banks}};
}

inline train::ModelArtifact decode_artifact(const json& j) {
    if (get_or<std::string>(j, "format", "") != "gridcast-model/1") throw ModelError("not a gridcast model artifact");
    train::ModelArtifact a;
    a.mode = train::parse_pooling_mode(j.at("mode"));
    for (const auto& b : j.at("banks")) {
        train::FittedBank fb;
        fb.params = decode_params(b.at("params"));
        fb.history.epoch_loss = b.at("epoch_loss").get<std::vector<double>>();
        a.banks.push_back(std::move(fb));
    }
    return a;
}

/// Training report: losses per bank without the parameter payload.
inline json training_report(const train::ModelArtifact& a, double seconds) {
    json banks = json::array();
    for (const auto& b : a.banks) {
        banks.push_back({{"series", b.params.series_ids()},
                         {"parameters", b.params.theta.size()},
                         {"epoch_loss", b.history.epoch_loss}});
    }
    return {{"mode", train::to_string(a.mode)}, {"banks", banks}, {"seconds", seconds}};
}

// ---- evaluation -------------------------------------------------------------

inline json encode_optional(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

inline json encode(const eval::Metrics& m) {
    return {{"rmse", m.rmse},
            {"mae", m.mae},
            {"mape", encode_optional(m.mape)},
            {"mase", encode_optional(m.mase)},
            {"msse", encode_optional(m.msse)},
            {"n_hours", m.n_hours}};
}

inline json encode(const eval::MetricsReport& r) {
    json rows = json::array();
    for (const auto& s : r.rows) rows.push_back({{"series", encode(s.series)}, {"metrics", encode(s.metrics)}});
    json dist = json::object();
    for (const auto& [name, d] : r.distribution) {
        dist[name] = {{"min", d.min}, {"q1", d.q1}, {"median", d.median}, {"q3", d.q3}, {"max", d.max}, {"mean", d.mean}};
    }
    return {{"model", r.model},
            {"level", to_string(r.level)},
            {"aggregation", r.load_weighted ? "load_weighted_mean" : "mean"},
            {"series", rows},
            {"aggregate", encode(r.aggregate)},
            {"distribution", dist}};
}

// ---- diagnostics ------------------------------------------------------------

inline json encode(const diagnose::AttributionResult& a) {
    json top = json::array();
    for (const auto& b : a.top_buses) top.push_back(b.id);
    json rows = json::array();
    for (const auto& r : a.rows) {
        rows.push_back({{"timestamp", encode(r.timestamp)},
                        {"utility_residual", r.utility_residual},
                        {"bus_residuals", r.bus_residuals},
                        {"remainder_residual", r.remainder_residual}});
    }
    json share = json::object();
    for (std::size_t i = 0; i < a.buses.size(); ++i) share[a.buses[i].id] = a.load_share[i];
    return {{"residual_convention", diagnose::kResidualConvention},
            {"top_buses", top},
            {"load_share", share},
            {"rows", rows}};
}

inline json encode(const diagnose::HighErrorProfile& p) {
    json buses = json::array();
    for (const auto& b : p.buses) {
        buses.push_back({{"bus", b.bus.id},
                         {"bias_share", b.bias_share},
                         {"mae_share", b.mae_share},
                         {"overall_mae_share", b.overall_mae_share},
                         {"overall_load_share", b.overall_load_share}});
    }
    json sel = json::array();
    for (auto t : p.selected) sel.push_back(encode(t));
    return {{"direction", diagnose::to_string(p.direction)},
            {"bias_denominator", "signed mean utility residual"},
            {"mae_denominator", "mean absolute utility residual"},
            {"residual_convention", diagnose::kResidualConvention},
            {"mean_utility_residual", p.mean_utility_residual},
            {"mean_abs_utility_residual", p.mean_abs_utility_residual},
            {"selected", sel},
            {"buses", buses}};
}

inline json encode(const diagnose::FeatureProfile& f) {
    json worst = json::array();
    for (const auto& w : f.worst) worst.push_back(w.id);
    auto q = [](const diagnose::Quartiles& x) { return json{{"q1", x.q1}, {"median", x.median}, {"q3", x.q3}}; };
    json rows = json::array();
    for (const auto& r : f.rows) {
        rows.push_back({{"feature", r.feature},
                        {"all", q(r.all)},
                        {"worst", q(r.worst)},
                        {"all_scaled", q(r.all_scaled)},
                        {"worst_scaled", q(r.worst_scaled)},
                        {"scaled_all_iqr", r.scaled_all_iqr()},
                        {"scaled_worst_iqr", r.scaled_worst_iqr()},
                        {"degenerate", r.degenerate}});
    }
    return {{"worst", worst}, {"features", rows}};
}

// ---- synthetic data ---------------------------------------------------------

inline synth::SynthSpec decode_synth_spec(const json& j) {
    synth::SynthSpec s;
    s.n_buses = get_or(j, "n_buses", s.n_buses);
    s.hours = get_or(j, "hours", s.hours);
    s.seed = get_or(j, "seed", s.seed);
    if (j.contains("start")) s.start = decode_timestamp(j["start"]);
    s.utility_id = get_or(j, "utility_id", s.utility_id);
    s.base_min = get_or(j, "base_min", s.base_min);
    s.base_max = get_or(j, "base_max", s.base_max);
    if (j.contains("temperature")) {
        const auto& t = j["temperature"];
        s.temperature.mean = get_or(t, "mean", s.temperature.mean);
        s.temperature.yearly_amplitude = get_or(t, "yearly_amplitude", s.temperature.yearly_amplitude);
        s.temperature.daily_amplitude = get_or(t, "daily_amplitude", s.temperature.daily_amplitude);
        s.temperature.anomaly_phi = get_or(t, "anomaly_phi", s.temperature.anomaly_phi);
        s.temperature.anomaly_sigma = get_or(t, "anomaly_sigma", s.temperature.anomaly_sigma);
    }
    s.breakpoint = get_or(j, "breakpoint", s.breakpoint);
    s.heating_slope = get_or(j, "heating_slope", s.heating_slope);
    s.cooling_slope = get_or(j, "cooling_slope", s.cooling_slope);
    s.trend_per_year = get_or(j, "trend_per_year", s.trend_per_year);
    s.noise_sigma = get_or(j, "noise_sigma", s.noise_sigma);
    s.ar_phi = get_or(j, "ar_phi", s.ar_phi);
    s.utility_factor = get_or(j, "utility_factor", s.utility_factor);
    s.utility_noise_sigma = get_or(j, "utility_noise_sigma", s.utility_noise_sigma);
    s.drift_rate = get_or(j, "drift_rate", s.drift_rate);
    s.profile_mix = get_or(j, "profile_mix", s.profile_mix);
    s.amplitude_jitter = get_or(j, "amplitude_jitter", s.amplitude_jitter);
    if (j.contains("archetypes")) {
        s.archetypes.clear();
        for (const auto& a : j["archetypes"]) {
            synth::ArchetypeProfile p;
            p.name = get_or<std::string>(a, "name", "archetype");
            p.daily_amplitude = get_or(a, "daily_amplitude", 0.0);
            p.weekly_amplitude = get_or(a, "weekly_amplitude", 0.0);
            p.yearly_amplitude = get_or(a, "yearly_amplitude", 0.0);
            p.heating_multiplier = get_or(a, "heating_multiplier", 1.0);
            p.cooling_multiplier = get_or(a, "cooling_multiplier", 1.0);
            p.holiday_offset = get_or(a, "holiday_offset", 0.0);
            s.archetypes.push_back(p);
        }
    }
    s.validate();
    return s;
}

inline json encode_ground_truth(const synth::SynthResult& r, const synth::SynthSpec& spec) {
    json buses = json::array();
    for (const auto& b : r.truth) {
        buses.push_back({{"id", b.id.id},
                         {"archetype", b.archetype},
                         {"archetype_name", spec.archetypes[b.archetype].name},
                         {"base_mw", b.base},
                         {"heating_slope", b.heating_slope},
                         {"cooling_slope", b.cooling_slope},
                         {"drift", b.drift},
                         {"mixture", b.mixture}});
    }
    return {{"seed", spec.seed}, {"hierarchy", encode(r.hierarchy)}, {"buses", buses}};
}

}  // namespace gridcast::io

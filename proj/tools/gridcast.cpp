// gridcast command-line interface.
#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gridcast/gridcast.hpp"
#include "gridcast/service/http.hpp"

namespace fs = std::filesystem;
using namespace gridcast;
using io::json;

namespace {

/// Values from --config; command-line flags win over them.
struct Config {
    json root = json::object();

    json section(const char* name) const {
        auto it = root.find(name);
        return it == root.end() ? json::object() : *it;
    }
};

Config load_config(const std::string& path) {
    Config c;
    if (!path.empty()) c.root = io::read_json_file(path);
    return c;
}

std::vector<LoadSeries> read_series(const std::vector<std::string>& paths) {
    std::vector<LoadSeries> out;
    for (const auto& p : paths) {
        auto part = data::ingest_csv(p);
        out.insert(out.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
    }
    return out;
}

std::vector<LoadSeries> of_level(const std::vector<LoadSeries>& v, Level l) {
    std::vector<LoadSeries> out;
    for (const auto& s : v) {
        if (s.series.level == l) out.push_back(s);
    }
    return out;
}

std::map<std::string, LoadSeries> by_id(const std::vector<LoadSeries>& v) {
    std::map<std::string, LoadSeries> m;
    for (const auto& s : v) m[s.series.id] = s;
    return m;
}

/// Hierarchies from the membership file, with statistics from cleaned data.
std::vector<Hierarchy> hierarchies_with_stats(const std::string& path, const std::vector<LoadSeries>& series,
                                              const SplitSpec& split) {
    const auto m = by_id(series);
    auto hs = data::read_hierarchy(path);
    for (auto& h : hs) {
        auto u = m.find(h.utility.id);
        if (u == m.end()) throw DataError("no data for utility " + h.utility.id);
        std::vector<LoadSeries> buses;
        for (const auto& b : h.buses) {
            auto it = m.find(b.id);
            if (it == m.end()) throw DataError("no data for bus " + b.id);
            buses.push_back(it->second);
        }
        h = data::compute_hierarchy_stats(u->second, buses, split);
    }
    return hs;
}

std::vector<ForecastBundle> read_forecasts(const std::string& path) {
    const json j = io::read_json_file(path);
    std::vector<ForecastBundle> out;
    for (const auto& b : j.at("forecasts")) out.push_back(io::decode_bundle(b));
    return out;
}

void write_forecasts(const std::string& path, const std::vector<ForecastBundle>& v) {
    json arr = json::array();
    for (const auto& b : v) arr.push_back(io::encode(b));
    io::write_json_file(path, {{"forecasts", arr}});
}

std::vector<Timestamp> test_origins(const LoadSeries& s, const SplitSpec& split) {
    std::vector<Timestamp> out;
    for (const auto& o : eval::select_eval_origins(data::split_boundary(s, split), s.end())) out.push_back(o.origin);
    return out;
}

// ---- subcommands ------------------------------------------------------------

int run_synth(const std::string& spec_path, const std::string& out_dir, std::optional<std::uint64_t> seed,
              const Config& cfg) {
    json j = cfg.section("synth");
    if (!spec_path.empty()) j = io::read_json_file(spec_path);
    auto spec = io::decode_synth_spec(j);
    if (seed) spec.seed = *seed;
    const auto res = synth::generate(spec);
    fs::create_directories(out_dir);
    const fs::path dir(out_dir);
    data::write_csv((dir / "utility.csv").string(), {res.utility});
    data::write_csv((dir / "buses.csv").string(), res.buses);
    data::write_hierarchy((dir / "hierarchy.csv").string(), {res.hierarchy});
    io::write_json_file((dir / "ground_truth.json").string(), io::encode_ground_truth(res, spec));
    std::cout << "wrote " << res.buses.size() << " buses and utility " << res.utility.series.id << " ("
              << spec.hours << " hours) to " << out_dir << '\n';
    return 0;
}

int run_ingest(const std::vector<std::string>& inputs, const std::string& level, const std::string& out) {
    std::optional<Level> lvl;
    if (!level.empty()) lvl = parse_level(level);
    std::vector<LoadSeries> all;
    for (const auto& p : inputs) {
        auto part = data::ingest_csv(p, lvl);
        all.insert(all.end(), part.begin(), part.end());
    }
    json summary = json::array();
    for (const auto& s : all) {
        std::size_t missing = 0;
        for (double v : s.load) missing += is_missing(v) ? 1 : 0;
        summary.push_back({{"series", io::encode(s.series)},
                           {"start", format_timestamp(s.start)},
                           {"hours", s.size()},
                           {"missing", missing}});
    }
    if (!out.empty()) data::write_csv(out, all);
    std::cout << json{{"series", summary}}.dump(2) << '\n';
    return 0;
}

int run_clean(const std::vector<std::string>& inputs, const std::string& out, const std::string& report,
              bool exclude, const SplitSpec& split) {
    auto all = read_series(inputs);
    json dropped = json::array();
    if (exclude) {
        auto ex = data::exclude_unusable(all, split);
        for (const auto& d : ex.dropped) dropped.push_back(io::encode(d));
        all = std::move(ex.kept);
    }
    std::vector<LoadSeries> cleaned;
    json reports = json::array();
    for (const auto& s : all) {
        auto r = data::clean_series(s);
        reports.push_back(io::encode(r.report));
        cleaned.push_back(std::move(r.series));
    }
    data::write_csv(out, cleaned);
    const json j = {{"cleaning", reports}, {"dropped", dropped}};
    if (!report.empty()) {
        io::write_json_file(report, j);
    } else {
        std::cout << j.dump(2) << '\n';
    }
    return 0;
}

int run_cluster(const std::vector<std::string>& inputs, std::size_t k, std::uint64_t seed, const std::string& out,
                const SplitSpec& split) {
    const auto buses = of_level(read_series(inputs), Level::Bus);
    std::vector<SeriesId> ids;
    std::vector<features::FeatureVector> feats;
    json fj = json::object();
    for (const auto& s : buses) {
        const auto train = data::split(s, split).first;
        ids.push_back(s.series);
        feats.push_back(features::extract_features(train));
        fj[s.series.id] = io::encode(feats.back());
    }
    auto g = features::cluster_kmeans(ids, feats, k, seed);
    json j = io::encode(g);
    j["feature_values"] = fj;
    io::write_json_file(out, j);
    std::cout << "clustered " << ids.size() << " buses into " << g.k() << " groups\n";
    return 0;
}

int run_train(const std::vector<std::string>& inputs, const std::string& mode, const std::string& level,
              const std::string& groups_path, const Config& cfg, std::uint64_t seed, const std::string& out,
              const std::string& report, const SplitSpec& split) {
    const auto mcfg = io::decode_config(cfg.section("model"));
    auto all = read_series(inputs);
    if (!level.empty()) all = of_level(all, parse_level(level));
    std::vector<LoadSeries> pool;
    for (const auto& s : all) pool.push_back(data::split(s, split).first);

    train::PoolingSpec ps;
    ps.mode = train::parse_pooling_mode(mode);
    if (ps.mode == train::PoolingMode::GroupedGlobal) {
        if (groups_path.empty()) throw ValidationError("grouped training needs --groups");
        ps.groups = io::decode_groups(io::read_json_file(groups_path));
    }
    const auto t0 = std::chrono::steady_clock::now();
    const auto art = train::fit(pool, ps, mcfg, seed);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    io::write_json_file(out, io::encode(art));
    const json rep = io::training_report(art, secs);
    if (!report.empty()) io::write_json_file(report, rep);
    std::cout << "trained " << art.banks.size() << " bank(s) in " << secs << " s\n";
    return 0;
}

struct ForecastArgs {
    std::vector<std::string> inputs;
    std::string model = "hitsgam";
    std::string level;
    std::string artifact;
    std::vector<std::string> origins;
    std::string reconcile = "none";
    std::string hierarchy;
    std::vector<std::string> stats_data;
    std::string out;
    std::size_t knn_k = 3;
};

int run_forecast(const ForecastArgs& a, const SplitSpec& split) {
    auto series = read_series(a.inputs);
    if (!a.level.empty()) series = of_level(series, parse_level(a.level));
    const auto kind = pipeline::parse_model_kind(a.model);
    std::optional<train::ModelArtifact> art;
    if (kind == pipeline::ModelKind::HitsGam) {
        if (a.artifact.empty()) throw ValidationError("hitsgam forecasts need --artifact");
        art = io::decode_artifact(io::read_json_file(a.artifact));
    }
    std::vector<ForecastBundle> out;
    for (const auto& s : series) {
        std::vector<Timestamp> origins;
        for (const auto& o : a.origins) origins.push_back(parse_timestamp(o));
        if (origins.empty()) origins = test_origins(s, split);
        const auto train = data::split(s, split).first;
        for (auto o : origins) {
            switch (kind) {
                case pipeline::ModelKind::HitsGam: out.push_back(pipeline::hitsgam_forecast(*art, s, o)); break;
                case pipeline::ModelKind::SNaive: out.push_back(baselines::snaive_forecast(s, o)); break;
                case pipeline::ModelKind::Knn: out.push_back(pipeline::knn_for(train, s, o, {a.knn_k})); break;
            }
        }
    }
    if (a.reconcile != "none") {
        if (a.hierarchy.empty()) throw ValidationError("reconciliation needs --hierarchy");
        auto stats_series = read_series(a.stats_data.empty() ? a.inputs : a.stats_data);
        const auto hs = hierarchies_with_stats(a.hierarchy, stats_series, split);
        std::vector<ForecastBundle> rec;
        for (const auto& h : hs) {
            if (a.reconcile == "top_down") {
                for (const auto& b : out) {
                    if (b.series == h.utility) {
                        auto parts = reconcile::top_down(b, h);
                        rec.insert(rec.end(), parts.begin(), parts.end());
                    }
                }
            } else if (a.reconcile == "bottom_up" || a.reconcile == "bottom_up_scaled") {
                std::map<Timestamp, std::vector<ForecastBundle>> per_origin;
                for (const auto& b : out) {
                    if (h.has_bus(b.series.id)) per_origin[b.origin].push_back(b);
                }
                for (const auto& [o, buses] : per_origin) {
                    rec.insert(rec.end(), buses.begin(), buses.end());
                    auto u = reconcile::bottom_up(buses, h);
                    rec.push_back(a.reconcile == "bottom_up" ? u : reconcile::scale_to_utility(u, h));
                }
            } else {
                throw ValidationError("unknown reconciliation '" + a.reconcile + "'");
            }
        }
        out = std::move(rec);
    }
    for (const auto& b : out) {
        if (b.additivity_gap() > 1e-6) throw ModelError("forecast for " + b.series.id + " is not additive");
    }
    write_forecasts(a.out, out);
    std::cout << "wrote " << out.size() << " forecast bundles\n";
    return 0;
}

int run_evaluate(const std::string& forecasts, const std::vector<std::string>& actual_paths, const std::string& level,
                 const std::string& ground_truth, const std::string& hierarchy, bool weighted, const std::string& out,
                 const std::string& table) {
    const Level lvl = parse_level(level);
    std::vector<ForecastBundle> fs;
    for (auto& b : read_forecasts(forecasts)) {
        if (b.series.level == lvl) fs.push_back(std::move(b));
    }
    const auto series = read_series(actual_paths);
    std::map<std::string, LoadSeries> truth;
    if (lvl == Level::Utility && ground_truth == "agg-bus") {
        if (hierarchy.empty()) throw ValidationError("agg-bus ground truth needs --hierarchy");
        const auto m = by_id(series);
        for (const auto& h : data::read_hierarchy(hierarchy)) {
            std::vector<LoadSeries> buses;
            for (const auto& b : h.buses) buses.push_back(m.at(b.id));
            truth[h.utility.id] = eval::aggregate_buses(buses, h.utility);
        }
    } else if (ground_truth == "utility" || lvl == Level::Bus) {
        truth = by_id(series);
    } else {
        throw ValidationError("unknown ground truth '" + ground_truth + "'");
    }
    eval::EvalOptions opts;
    opts.load_weighted = weighted;
    const auto rep = eval::evaluate_run(fs, truth, lvl, opts);
    json j = io::encode(rep);
    j["ground_truth"] = lvl == Level::Bus ? "bus" : ground_truth;
    const auto& q = fs.front().quantiles;
    if (std::find(q.begin(), q.end(), 0.01) != q.end() && std::find(q.begin(), q.end(), 0.99) != q.end()) {
        j["coverage_98"] = eval::interval_coverage(fs, truth);
    }
    if (!out.empty()) {
        io::write_json_file(out, j);
    } else {
        std::cout << j.dump(2) << '\n';
    }
    if (!table.empty()) {
        std::ofstream t(table);
        eval::write_distribution_csv(t, {rep});
    }
    return 0;
}

int run_attribute(const std::string& forecasts, const std::vector<std::string>& actual_paths,
                  const std::string& hierarchy, std::size_t top_n, const std::string& from, const std::string& to,
                  const std::string& out, const std::string& plot_dir, bool with_features, const SplitSpec& split) {
    const auto series = read_series(actual_paths);
    const auto actuals = by_id(series);
    std::optional<Timestamp> lo, hi;
    if (!from.empty()) lo = parse_timestamp(from);
    if (!to.empty()) hi = parse_timestamp(to);
    const auto all = read_forecasts(forecasts);
    json results = json::array();
    for (const auto& h : data::read_hierarchy(hierarchy)) {
        std::vector<ForecastBundle> buses, utility;
        for (const auto& b : all) {
            if ((lo && b.origin < *lo) || (hi && b.origin > *hi)) continue;
            if (h.has_bus(b.series.id)) buses.push_back(b);
            if (b.series == h.utility && b.reconciliation == "bottom_up") utility.push_back(b);
        }
        const auto a = diagnose::attribute_errors(buses, actuals, h, top_n, utility);
        const auto [pos, neg] = diagnose::high_error_analysis(a);
        json r = {{"utility", h.utility.id},
                  {"attribution", io::encode(a)},
                  {"high_error", {{"positive", io::encode(pos)}, {"negative", io::encode(neg)}}}};
        if (with_features) {
            std::vector<SeriesId> ids;
            std::vector<features::FeatureVector> feats;
            std::vector<double> mae(h.buses.size(), 0.0);
            for (std::size_t i = 0; i < h.buses.size(); ++i) {
                ids.push_back(h.buses[i]);
                feats.push_back(features::extract_features(data::split(actuals.at(h.buses[i].id), split).first));
                for (const auto& row : a.residuals) mae[i] += std::abs(row[i]);
                mae[i] /= static_cast<double>(a.residuals.size());
            }
            r["feature_profile"] = io::encode(diagnose::feature_error_profile(ids, feats, mae, std::min<std::size_t>(10, ids.size())));
        }
        if (!plot_dir.empty()) {
            fs::create_directories(plot_dir);
            std::ofstream f1(fs::path(plot_dir) / (h.utility.id + "_attribution.csv"));
            f1 << "timestamp,utility_residual";
            for (const auto& b : a.top_buses) f1 << ',' << b.id;
            f1 << ",remainder\n";
            for (const auto& row : a.rows) {
                f1 << format_timestamp(row.timestamp) << ',' << row.utility_residual;
                for (double v : row.bus_residuals) f1 << ',' << v;
                f1 << ',' << row.remainder_residual << '\n';
            }
            std::ofstream f2(fs::path(plot_dir) / (h.utility.id + "_high_error.csv"));
            f2 << "direction,bus,bias_share,mae_share,overall_mae_share,overall_load_share\n";
            for (const auto* p : {&pos, &neg}) {
                for (const auto& b : p->buses) {
                    f2 << diagnose::to_string(p->direction) << ',' << b.bus.id << ',' << b.bias_share << ','
                       << b.mae_share << ',' << b.overall_mae_share << ',' << b.overall_load_share << '\n';
                }
            }
        }
        results.push_back(r);
    }
    const json j = {{"residual_convention", diagnose::kResidualConvention}, {"utilities", results}};
    if (!out.empty()) {
        io::write_json_file(out, j);
    } else {
        std::cout << j.dump(2) << '\n';
    }
    return 0;
}

struct ServeArgs {
    std::string store = "gridcast-store";
    std::string host = "127.0.0.1";
    int port = 8080;
    std::string tag = "default";
    std::vector<std::string> import_forecasts;
    std::vector<std::string> import_actuals;
    std::string import_hierarchy;
    std::string ui_dir;
    bool no_listen = false;
};

int run_serve(const ServeArgs& a, const SplitSpec& split) {
    service::ForecastStore store(a.store);
    const auto series = read_series(a.import_actuals);
    for (const auto& s : series) store.put_actuals(s);
    if (!a.import_hierarchy.empty()) {
        for (const auto& h : hierarchies_with_stats(a.import_hierarchy, series, split)) store.put_hierarchy(h);
    }
    std::size_t published = 0, skipped = 0;
    for (const auto& path : a.import_forecasts) {
        for (const auto& b : read_forecasts(path)) {
            try {
                store.publish(b, a.tag);
                ++published;
            } catch (const Conflict&) {
                ++skipped;  // already stored under this tag
            }
        }
    }
    std::cout << "store " << a.store << ": published " << published << ", already present " << skipped << '\n';
    if (a.no_listen) return 0;
    service::Service svc(store, a.tag);
    std::optional<std::string> ui;
    if (!a.ui_dir.empty()) ui = a.ui_dir;
    auto srv = service::make_http_server(svc, ui);
    std::cout << "listening on http://" << a.host << ':' << a.port << std::endl;
    if (!srv->listen(a.host, a.port)) {
        std::cerr << "cannot listen on " << a.host << ':' << a.port << '\n';
        return 1;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"gridcast: multi-level day-ahead load forecasting"};
    app.require_subcommand(1);
    std::string config_path;
    std::optional<std::uint64_t> seed;
    double train_fraction = -1.0;
    app.add_option("--config", config_path, "JSON configuration file");
    app.add_option("--seed", seed, "random seed");
    app.add_option("--train-fraction", train_fraction, "training share of each series (default 0.8)");

    // synth
    auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic utility with buses");
    std::string spec_path, synth_out = "synth";
    synth_cmd->add_option("--spec", spec_path, "synthetic dataset spec (JSON)");
    synth_cmd->add_option("--out", synth_out, "output directory");

    // ingest
    auto* ingest_cmd = app.add_subcommand("ingest", "validate CSV input and report its shape");
    std::vector<std::string> ingest_in;
    std::string ingest_level, ingest_out;
    ingest_cmd->add_option("--input", ingest_in, "input CSV file(s)")->required();
    ingest_cmd->add_option("--level", ingest_level, "expected level tag (utility|bus)");
    ingest_cmd->add_option("--out", ingest_out, "write the gap-filled grid as CSV");

    // clean
    auto* clean_cmd = app.add_subcommand("clean", "exclude unusable series, remove outliers, impute gaps");
    std::vector<std::string> clean_in;
    std::string clean_out, clean_report;
    bool no_exclude = false;
    clean_cmd->add_option("--input", clean_in, "input CSV file(s)")->required();
    clean_cmd->add_option("--out", clean_out, "cleaned CSV")->required();
    clean_cmd->add_option("--report", clean_report, "cleaning report JSON");
    clean_cmd->add_flag("--no-exclude", no_exclude, "keep series that fail the usability rules");

    // cluster
    auto* cluster_cmd = app.add_subcommand("cluster", "k-means grouping of buses on series features");
    std::vector<std::string> cluster_in;
    std::size_t cluster_k = 3;
    std::string cluster_out;
    cluster_cmd->add_option("--input", cluster_in, "cleaned bus CSV file(s)")->required();
    cluster_cmd->add_option("--k", cluster_k, "number of groups");
    cluster_cmd->add_option("--out", cluster_out, "group assignment JSON")->required();

    // train
    auto* train_cmd = app.add_subcommand("train", "fit hits-GAM banks");
    std::vector<std::string> train_in;
    std::string train_mode = "global", train_level, train_groups, train_out, train_report;
    train_cmd->add_option("--input", train_in, "cleaned CSV file(s)")->required();
    train_cmd->add_option("--mode", train_mode, "local|global|grouped");
    train_cmd->add_option("--level", train_level, "train only series of this level");
    train_cmd->add_option("--groups", train_groups, "group assignment JSON (grouped mode)");
    train_cmd->add_option("--out", train_out, "model artifact JSON")->required();
    train_cmd->add_option("--report", train_report, "training report JSON");

    // forecast
    auto* fc_cmd = app.add_subcommand("forecast", "produce forecast bundles");
    ForecastArgs fa;
    fc_cmd->add_option("--input", fa.inputs, "cleaned CSV file(s) with the series to forecast")->required();
    fc_cmd->add_option("--model", fa.model, "hitsgam|snaive|knn");
    fc_cmd->add_option("--level", fa.level, "forecast only series of this level");
    fc_cmd->add_option("--artifact", fa.artifact, "model artifact (hitsgam)");
    fc_cmd->add_option("--origin", fa.origins, "origin timestamp(s); default: every 14:00 origin in the test split");
    fc_cmd->add_option("--reconcile", fa.reconcile, "none|top_down|bottom_up|bottom_up_scaled");
    fc_cmd->add_option("--hierarchy", fa.hierarchy, "hierarchy CSV");
    fc_cmd->add_option("--stats-data", fa.stats_data, "cleaned CSV(s) for hierarchy statistics");
    fc_cmd->add_option("--knn-k", fa.knn_k, "neighbours for the knn model");
    fc_cmd->add_option("--out", fa.out, "forecast JSON")->required();

    // evaluate
    auto* ev_cmd = app.add_subcommand("evaluate", "score forecasts on target-day hours");
    std::string ev_fc, ev_level = "utility", ev_truth = "utility", ev_h, ev_out, ev_table;
    std::vector<std::string> ev_actuals;
    bool ev_weighted = false;
    ev_cmd->add_option("--forecasts", ev_fc, "forecast JSON")->required();
    ev_cmd->add_option("--actuals", ev_actuals, "cleaned CSV file(s)")->required();
    ev_cmd->add_option("--level", ev_level, "utility|bus");
    ev_cmd->add_option("--ground-truth", ev_truth, "utility|agg-bus");
    ev_cmd->add_option("--hierarchy", ev_h, "hierarchy CSV (agg-bus ground truth)");
    ev_cmd->add_flag("--load-weighted", ev_weighted, "weight the aggregate by mean load");
    ev_cmd->add_option("--out", ev_out, "metrics report JSON");
    ev_cmd->add_option("--table", ev_table, "distribution table CSV");

    // attribute
    auto* at_cmd = app.add_subcommand("attribute", "attribute utility errors to buses");
    std::string at_fc, at_h, at_from, at_to, at_out, at_plot;
    std::vector<std::string> at_actuals;
    std::size_t at_top = 5;
    bool at_features = false;
    at_cmd->add_option("--forecasts", at_fc, "bottom-up forecast JSON")->required();
    at_cmd->add_option("--actuals", at_actuals, "cleaned bus CSV file(s)")->required();
    at_cmd->add_option("--hierarchy", at_h, "hierarchy CSV")->required();
    at_cmd->add_option("--top-n", at_top, "buses shown individually");
    at_cmd->add_option("--from", at_from, "first origin");
    at_cmd->add_option("--to", at_to, "last origin");
    at_cmd->add_option("--out", at_out, "attribution JSON");
    at_cmd->add_option("--plot-data", at_plot, "directory for chart-ready CSV");
    at_cmd->add_flag("--features", at_features, "add the feature-vs-error comparison");

    // serve
    auto* sv_cmd = app.add_subcommand("serve", "HTTP API over a forecast store");
    ServeArgs sa;
    sv_cmd->add_option("--store", sa.store, "store directory");
    sv_cmd->add_option("--host", sa.host, "bind address");
    sv_cmd->add_option("--port", sa.port, "port");
    sv_cmd->add_option("--model-tag", sa.tag, "model tag for imports and default reads");
    sv_cmd->add_option("--import-forecasts", sa.import_forecasts, "forecast JSON to publish");
    sv_cmd->add_option("--import-actuals", sa.import_actuals, "cleaned CSV to store as actuals");
    sv_cmd->add_option("--import-hierarchy", sa.import_hierarchy, "hierarchy CSV (statistics from the actuals)");
    sv_cmd->add_option("--ui-dir", sa.ui_dir, "static dashboard directory served at /");
    sv_cmd->add_flag("--no-listen", sa.no_listen, "import only, then exit");

    CLI11_PARSE(app, argc, argv);

    try {
        const Config cfg = load_config(config_path);
        SplitSpec split;
        split.train_fraction = train_fraction > 0.0 ? train_fraction : io::get_or(cfg.root, "train_fraction", 0.8);
        const std::uint64_t s = seed.value_or(io::get_or<std::uint64_t>(cfg.root, "seed", 42));

        if (*synth_cmd) return run_synth(spec_path, synth_out, seed, cfg);
        if (*ingest_cmd) return run_ingest(ingest_in, ingest_level, ingest_out);
        if (*clean_cmd) return run_clean(clean_in, clean_out, clean_report, !no_exclude, split);
        if (*cluster_cmd) {
            const std::size_t k = cluster_cmd->count("--k") ? cluster_k : io::get_or(cfg.section("cluster"), "k", cluster_k);
            return run_cluster(cluster_in, k, s, cluster_out, split);
        }
        if (*train_cmd) {
            return run_train(train_in, train_mode, train_level, train_groups, cfg, s, train_out, train_report, split);
        }
        if (*fc_cmd) {
            if (!fc_cmd->count("--knn-k")) fa.knn_k = io::get_or(cfg.section("knn"), "k", fa.knn_k);
            return run_forecast(fa, split);
        }
        if (*ev_cmd) return run_evaluate(ev_fc, ev_actuals, ev_level, ev_truth, ev_h, ev_weighted, ev_out, ev_table);
        if (*at_cmd) return run_attribute(at_fc, at_actuals, at_h, at_top, at_from, at_to, at_out, at_plot, at_features, split);
        if (*sv_cmd) return run_serve(sa, split);
    } catch (const Error& e) {
        std::cerr << "gridcast: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "gridcast: unexpected failure: " << e.what() << '\n';
        return 3;
    }
    return 0;
}

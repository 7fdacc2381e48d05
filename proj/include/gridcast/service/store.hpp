#pragma once

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <sstream>
#include <thread>
#include <memory>
#include <algorithm>
#include <string>
#include <vector>

#include "gridcast/core/error.hpp"
#include "gridcast/core/forecast.hpp"
#include "gridcast/data/csv.hpp"
#include "gridcast/io/json.hpp"
#include "gridcast/service/adjustments.hpp"

namespace gridcast::service {

namespace fs = std::filesystem;

/// Append-only adjustment log, one JSON object per line. Writers are
/// serialized; every line carries the journal schema version.
class AdjustmentJournal {
public:
    explicit AdjustmentJournal(fs::path file) : file_(std::move(file)) { load(); }

    std::vector<AdjustmentRecord> records() const {
        std::shared_lock lock(mu_);
        return records_;
    }

    /// Records whose window contains `t`.
    std::vector<AdjustmentRecord> active_at(Timestamp t) const {
        std::shared_lock lock(mu_);
        std::vector<AdjustmentRecord> out;
        for (const auto& r : records_) {
            if (r.covers(t)) out.push_back(r);
        }
        return out;
    }

    /// Validates, assigns id and timestamp, checks load-factor conflicts and
    /// appends durably.
    AdjustmentRecord append(AdjustmentRecord r, const std::vector<Hierarchy>& hierarchies) {
        std::unique_lock lock(mu_);
        r.validate();
        for (const auto& h : hierarchies) {
            if (applies_to(r, h)) affected_buses(r, h);
        }
        bool known = false;
        for (const auto& h : hierarchies) known = known || applies_to(r, h);
        if (!known) throw NotFound("adjustment scope matches no known utility or bus");
        check_conflicts(r, records_, hierarchies);
        char id[32];
        std::snprintf(id, sizeof id, "adj-%06zu", records_.size() + 1);
        r.id = id;
        if (r.created_at.empty()) r.created_at = now_iso();
        io::json line = {{"version", kJournalVersion}, {"record", encode(r)}};
        std::ofstream out(file_, std::ios::app | std::ios::binary);
        if (!out) throw DataError("cannot append to adjustment journal");
        out << line.dump() << '\n';
        out.flush();
        if (!out) throw DataError("adjustment journal write failed");
        records_.push_back(r);
        return r;
    }

    static std::string now_iso() {
        const auto now = std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now());
        const auto days = std::chrono::floor<std::chrono::days>(now);
        const std::chrono::year_month_day ymd{days};
        const std::chrono::hh_mm_ss hms{now - days};
        char buf[32];
        std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                      static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                      static_cast<int>(hms.hours().count()), static_cast<int>(hms.minutes().count()),
                      static_cast<int>(hms.seconds().count()));
        return buf;
    }

private:
    void load() {
        std::ifstream in(file_);
        if (!in) return;
        std::string line;
        std::size_t n = 0;
        while (std::getline(in, line)) {
            ++n;
            if (line.empty()) continue;
            io::json j;
            try {
                j = io::json::parse(line);
            } catch (const io::json::exception&) {
                throw DataError("adjustment journal line " + std::to_string(n) + " is not JSON");
            }
            const int version = j.at("version").get<int>();
            if (version > kJournalVersion) throw DataError("adjustment journal has a newer schema version");
            records_.push_back(decode_adjustment(j.at("record")));
        }
    }

    fs::path file_;
    mutable std::shared_mutex mu_;
    std::vector<AdjustmentRecord> records_;
};

/// File-backed store. Layout under the root:
///   forecasts/<tag>/<level>/<series>/<origin>.json   write-once bundles
///   actuals/<level>/<series>.csv                      ingested observations
///   hierarchies/<utility>.json                        hierarchy with statistics
///   adjustments.jsonl                                 adjustment journal
class ForecastStore {
public:
    explicit ForecastStore(fs::path root) : root_(std::move(root)) {
        fs::create_directories(root_ / "forecasts");
        fs::create_directories(root_ / "actuals");
        fs::create_directories(root_ / "hierarchies");
        journal_ = std::make_unique<AdjustmentJournal>(root_ / "adjustments.jsonl");
    }

    const fs::path& root() const { return root_; }
    AdjustmentJournal& journal() { return *journal_; }
    const AdjustmentJournal& journal() const { return *journal_; }

    static std::string origin_key(Timestamp t) {
        const CivilHour c = civil(t);
        char buf[16];
        std::snprintf(buf, sizeof buf, "%04d%02u%02uT%02d", c.year, c.month, c.day, c.hour);
        return buf;
    }

    static void check_token(const std::string& s, const char* what) {
        if (s.empty() || s.find_first_of("/\\") != std::string::npos || s == "." || s == "..") {
            throw ValidationError(std::string("invalid ") + what + " '" + s + "'");
        }
    }

    fs::path bundle_path(const SeriesId& id, Timestamp origin, const std::string& tag) const {
        check_token(tag, "model tag");
        check_token(id.id, "series id");
        return root_ / "forecasts" / tag / to_string(id.level) / id.id / (origin_key(origin) + ".json");
    }

    /// Persists a bundle once; a second publish of the same key is a conflict.
    std::string publish(const ForecastBundle& b, const std::string& tag) {
        const fs::path dst = bundle_path(b.series, b.origin, tag);
        fs::create_directories(dst.parent_path());
        const fs::path tmp = dst.string() + ".tmp" + std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id()));
        {
            std::ofstream out(tmp, std::ios::binary);
            if (!out) throw DataError("cannot write " + tmp.string());
            out << io::encode(b).dump() << '\n';
        }
        std::error_code ec;
        fs::create_hard_link(tmp, dst, ec);
        fs::remove(tmp);
        if (ec) {
            if (fs::exists(dst)) {
                throw Conflict("forecast " + b.series.id + " @ " + format_timestamp(b.origin) + " already published under tag " + tag);
            }
            throw DataError("cannot publish forecast: " + ec.message());
        }
        return fs::relative(dst, root_).string();
    }

    std::optional<ForecastBundle> find(const SeriesId& id, Timestamp origin, const std::string& tag) const {
        const fs::path p = bundle_path(id, origin, tag);
        if (!fs::exists(p)) return std::nullopt;
        return io::decode_bundle(io::read_json_file(p.string()));
    }

    ForecastBundle get(const SeriesId& id, Timestamp origin, const std::string& tag) const {
        auto b = find(id, origin, tag);
        if (!b) throw NotFound("no forecast for " + id.id + " at " + format_timestamp(origin) + " under tag " + tag);
        return *b;
    }

    std::vector<std::string> tags() const { return list_dirs(root_ / "forecasts"); }

    std::vector<Timestamp> origins(const SeriesId& id, const std::string& tag) const {
        std::vector<Timestamp> out;
        const fs::path dir = root_ / "forecasts" / tag / to_string(id.level) / id.id;
        if (!fs::is_directory(dir)) return out;
        for (const auto& e : fs::directory_iterator(dir)) {
            const std::string name = e.path().filename().string();
            if (e.path().extension() != ".json" || name.size() != 16) continue;
            const std::string iso = name.substr(0, 4) + "-" + name.substr(4, 2) + "-" + name.substr(6, 2) + "T" +
                                    name.substr(9, 2) + ":00:00";
            out.push_back(parse_timestamp(iso));
        }
        std::sort(out.begin(), out.end());
        return out;
    }

    std::vector<SeriesId> forecast_series(const std::string& tag) const {
        std::vector<SeriesId> out;
        for (const auto& lvl : {Level::Utility, Level::Bus}) {
            for (const auto& id : list_dirs(root_ / "forecasts" / tag / to_string(lvl))) out.push_back({id, lvl});
        }
        return out;
    }

    void put_actuals(const LoadSeries& s) {
        check_token(s.series.id, "series id");
        const fs::path dir = root_ / "actuals" / to_string(s.series.level);
        fs::create_directories(dir);
        std::unique_lock lock(mu_);
        data::write_csv((dir / (s.series.id + ".csv")).string(), {s});
    }

    std::optional<LoadSeries> actuals(const SeriesId& id) const {
        check_token(id.id, "series id");
        const fs::path p = root_ / "actuals" / to_string(id.level) / (id.id + ".csv");
        std::shared_lock lock(mu_);
        if (!fs::exists(p)) return std::nullopt;
        auto v = data::ingest_csv(p.string(), id.level);
        if (v.empty()) return std::nullopt;
        return v.front();
    }

    void put_hierarchy(const Hierarchy& h) {
        check_token(h.utility.id, "utility id");
        std::unique_lock lock(mu_);
        io::write_json_file((root_ / "hierarchies" / (h.utility.id + ".json")).string(), io::encode(h));
    }

    std::vector<Hierarchy> hierarchies() const {
        std::shared_lock lock(mu_);
        std::vector<Hierarchy> out;
        for (const auto& e : fs::directory_iterator(root_ / "hierarchies")) {
            if (e.path().extension() != ".json") continue;
            const auto j = io::read_json_file(e.path().string());
            Hierarchy h;
            h.utility = {j.at("utility").get<std::string>(), Level::Utility};
            for (const auto& b : j.at("buses")) h.buses.push_back({b.get<std::string>(), Level::Bus});
            h.proportions = j.at("proportions").get<std::map<std::string, double>>();
            h.agg_scale = j.at("agg_scale").get<double>();
            out.push_back(std::move(h));
        }
        std::sort(out.begin(), out.end(), [](const Hierarchy& a, const Hierarchy& b) { return a.utility < b.utility; });
        return out;
    }

    Hierarchy hierarchy(const std::string& utility) const {
        for (auto& h : hierarchies()) {
            if (h.utility.id == utility) return h;
        }
        throw NotFound("unknown utility '" + utility + "'");
    }

private:
    static std::vector<std::string> list_dirs(const fs::path& dir) {
        std::vector<std::string> out;
        if (!fs::is_directory(dir)) return out;
        for (const auto& e : fs::directory_iterator(dir)) {
            if (e.is_directory()) out.push_back(e.path().filename().string());
        }
        std::sort(out.begin(), out.end());
        return out;
    }

    fs::path root_;
    mutable std::shared_mutex mu_;
    std::unique_ptr<AdjustmentJournal> journal_;
};

}  // namespace gridcast::service

#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "gridcast/core/error.hpp"
#include "gridcast/core/types.hpp"
#include "gridcast/data/calendar.hpp"
#include "gridcast/model/components.hpp"
#include "gridcast/model/config.hpp"
#include "gridcast/model/mlp.hpp"

namespace gridcast::model {

struct Scaler {
    double mean = 0.0;
    double sd = 1.0;

    double scale(double x) const { return (x - mean) / sd; }
    double unscale(double z) const { return z * sd + mean; }
};

struct SeriesMeta {
    SeriesId id;
    TrendClock clock;
    Scaler scaler;
};

/// Full parameter bank of one fitted model. `theta` is laid out as
/// [AR net | temperature net | local bank 0 | local bank 1 | ...]; local
/// bank i belongs to `series[i]`.
struct HitsGamParams {
    HitsGamConfig config;
    std::uint64_t seed = 0;
    std::vector<std::string> event_names = data::federal_holiday_names();
    std::vector<SeriesMeta> series;
    Scaler temperature_scaler;
    Eigen::VectorXd theta;

    Mlp ar_net() const {
        std::vector<std::size_t> dims{config.n_lags};
        dims.insert(dims.end(), config.ar_layers.begin(), config.ar_layers.end());
        dims.push_back(config.outputs());
        return Mlp(std::move(dims));
    }

    Mlp temperature_net() const {
        std::vector<std::size_t> dims{config.horizon};
        dims.insert(dims.end(), config.lagged_reg_layers.begin(), config.lagged_reg_layers.end());
        dims.push_back(config.outputs());
        return Mlp(std::move(dims));
    }

    LocalLayout local_layout() const { return LocalLayout(config, event_names.size()); }

    std::size_t ar_offset() const { return 0; }
    std::size_t temperature_offset() const { return ar_net().size(); }
    std::size_t local_offset(std::size_t bank) const {
        return temperature_offset() + temperature_net().size() + bank * local_layout().size();
    }
    std::size_t total_size() const { return local_offset(series.size()); }

    std::size_t bank_of(const std::string& id) const {
        for (std::size_t i = 0; i < series.size(); ++i) {
            if (series[i].id.id == id) return i;
        }
        throw NotFound("no local bank for series '" + id + "'");
    }

    bool covers(const std::string& id) const {
        for (const auto& s : series) {
            if (s.id.id == id) return true;
        }
        return false;
    }

    std::vector<std::string> series_ids() const {
        std::vector<std::string> out;
        for (const auto& s : series) out.push_back(s.id.id);
        return out;
    }

    const double* local(std::size_t bank) const { return theta.data() + local_offset(bank); }
    double* local(std::size_t bank) { return theta.data() + local_offset(bank); }

    void allocate() {
        theta = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(total_size()));
    }
};

}  // namespace gridcast::model

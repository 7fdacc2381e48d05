#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "gridcast/core/error.hpp"

namespace gridcast::model {

struct HitsGamConfig {
    std::size_t n_lags = 24 * 15;
    std::size_t horizon = 33;
    std::vector<double> quantiles = {0.01, 0.50, 0.99};
    std::size_t yearly_order = 10;
    std::size_t weekly_order = 3;
    std::size_t daily_order = 6;
    unsigned summer_first_month = 4;  // April
    unsigned summer_last_month = 9;   // September
    std::size_t n_changepoints = 0;
    std::vector<std::size_t> ar_layers = {32, 64, 32, 16};
    std::vector<std::size_t> lagged_reg_layers = {32, 32};
    std::size_t batch_size = 128;
    double learning_rate = 0.001;
    std::size_t epochs = 30;
    double newer_samples_weight = 2.0;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_epsilon = 1e-8;
    // Start each series' trend, seasonality and events at their least-squares
    // fit to the scaled training load instead of zero.
    bool warm_start_local = true;

    std::size_t num_quantiles() const { return quantiles.size(); }
    std::size_t outputs() const { return horizon * quantiles.size(); }

    std::size_t median_index() const {
        for (std::size_t i = 0; i < quantiles.size(); ++i) {
            if (quantiles[i] == 0.5) return i;
        }
        throw ModelError("quantiles must contain 0.5");
    }

    void validate() const {
        if (horizon < 1) throw ModelError("horizon must be at least 1");
        if (n_lags < 1) throw ModelError("n_lags must be at least 1");
        if (quantiles.empty()) throw ModelError("quantile list is empty");
        for (std::size_t i = 0; i < quantiles.size(); ++i) {
            if (!(quantiles[i] > 0.0 && quantiles[i] < 1.0)) throw ModelError("quantiles must lie in (0, 1)");
            if (i > 0 && !(quantiles[i] > quantiles[i - 1])) {
                throw ModelError("quantiles must be strictly increasing");
            }
        }
        median_index();
        if (ar_layers.empty() || lagged_reg_layers.empty()) throw ModelError("layer lists must be non-empty");
        for (auto w : ar_layers) {
            if (w == 0) throw ModelError("zero-width layer");
        }
        for (auto w : lagged_reg_layers) {
            if (w == 0) throw ModelError("zero-width layer");
        }
        if (yearly_order == 0 || weekly_order == 0 || daily_order == 0) {
            throw ModelError("Fourier orders must be at least 1");
        }
        if (batch_size == 0) throw ModelError("batch size must be at least 1");
        if (!(newer_samples_weight >= 1.0)) throw ModelError("newer_samples_weight must be >= 1");
    }
};

}  // namespace gridcast::model

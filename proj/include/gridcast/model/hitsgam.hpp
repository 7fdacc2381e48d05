#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "gridcast/core/error.hpp"
#include "gridcast/core/forecast.hpp"
#include "gridcast/core/types.hpp"
#include "gridcast/data/calendar.hpp"
#include "gridcast/model/components.hpp"
#include "gridcast/model/mlp.hpp"
#include "gridcast/model/params.hpp"

namespace gridcast::model {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Holiday table used for event regressors.
inline const data::HolidayCalendar& model_calendar() {
    static const data::HolidayCalendar cal = data::HolidayCalendar::federal(1970, 2100);
    return cal;
}

inline double pinball_loss(double actual, double predicted, double q) {
    return actual >= predicted ? q * (actual - predicted) : (1.0 - q) * (predicted - actual);
}

// ---- interpretable components (scaled units) ---------------------------------------------

/// Trend at `t_hours` since the series' training start.
inline double trend_at(const HitsGamParams& p, const std::string& id, double t_hours) {
    const std::size_t bank = p.bank_of(id);
    const auto lay = p.local_layout();
    const double* beta = p.local(bank);
    const double tn = t_hours / static_cast<double>(p.series[bank].clock.train_hours);
    double v = beta[0] + beta[1] * tn;
    for (std::size_t j = 0; j < lay.changepoints; ++j) {
        v += beta[2 + j] * std::max(0.0, tn - changepoint_location(j, lay.changepoints));
    }
    return v;
}

namespace detail {

inline double dot_block(const std::vector<double>& f, const double* beta) {
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) s += f[i] * beta[i];
    return s;
}

}  // namespace detail

/// Yearly + weekly + month-gated daily Fourier blocks.
inline double seasonality_at(const HitsGamParams& p, const std::string& id, Timestamp t) {
    const std::size_t bank = p.bank_of(id);
    const auto lay = p.local_layout();
    const double* beta = p.local(bank);
    double v = detail::dot_block(fourier_features(t, kYearHours, lay.yearly), beta + lay.yearly_begin());
    v += detail::dot_block(fourier_features(t, kWeekHours, lay.weekly), beta + lay.weekly_begin());
    const auto daily = fourier_features(t, kDayHours, lay.daily);
    v += is_summer(t, p.config) ? detail::dot_block(daily, beta + lay.summer_begin())
                                : detail::dot_block(daily, beta + lay.winter_begin());
    return v;
}

inline double events_at(const HitsGamParams& p, const std::string& id, Timestamp t) {
    const std::size_t bank = p.bank_of(id);
    const auto lay = p.local_layout();
    const double* beta = p.local(bank);
    double v = 0.0;
    for (const auto& name : model_calendar().on(t)) {
        for (std::size_t e = 0; e < p.event_names.size(); ++e) {
            if (p.event_names[e] == name) v += beta[lay.events_begin() + e];
        }
    }
    return v;
}

// ---- neural components ---------------------------------------------------------------------

/// Quantile-major network output reshaped to (quantiles x horizon).
inline Matrix to_quantile_rows(const Matrix& out, const HitsGamConfig& cfg) {
    Matrix r(static_cast<Eigen::Index>(cfg.num_quantiles()), static_cast<Eigen::Index>(cfg.horizon));
    for (std::size_t q = 0; q < cfg.num_quantiles(); ++q) {
        for (std::size_t h = 0; h < cfg.horizon; ++h) {
            r(static_cast<Eigen::Index>(q), static_cast<Eigen::Index>(h)) =
                out(static_cast<Eigen::Index>(q * cfg.horizon + h), 0);
        }
    }
    return r;
}

inline Matrix ar_forward(const HitsGamParams& p, std::span<const double> lag_window) {
    if (lag_window.size() != p.config.n_lags) throw ModelError("lag window length mismatch");
    Matrix x = Eigen::Map<const Vector>(lag_window.data(), static_cast<Eigen::Index>(lag_window.size()));
    return to_quantile_rows(p.ar_net().forward(p.theta.data() + p.ar_offset(), x), p.config);
}

inline Matrix temperature_forward(const HitsGamParams& p, std::span<const double> future_temps) {
    if (future_temps.size() != p.config.horizon) throw ModelError("future temperature length mismatch");
    Matrix x = Eigen::Map<const Vector>(future_temps.data(), static_cast<Eigen::Index>(future_temps.size()));
    return to_quantile_rows(p.temperature_net().forward(p.theta.data() + p.temperature_offset(), x), p.config);
}

// ---- training-side representation ----------------------------------------------------------

/// Scaled load/temperature and design rows for every hour of one series.
struct PreparedSeries {
    std::size_t bank = 0;
    Timestamp start;
    Vector load;         // scaled
    Vector temperature;  // scaled
    RowMatrix design;    // hours x local layout

    std::size_t size() const { return static_cast<std::size_t>(load.size()); }
};

inline PreparedSeries prepare(const HitsGamParams& p, std::size_t bank, const LoadSeries& s) {
    const auto lay = p.local_layout();
    PreparedSeries ps;
    ps.bank = bank;
    ps.start = s.start;
    const auto n = static_cast<Eigen::Index>(s.size());
    ps.load.resize(n);
    ps.temperature.resize(n);
    ps.design.resize(n, static_cast<Eigen::Index>(lay.size()));
    const auto& meta = p.series[bank];
    for (Eigen::Index i = 0; i < n; ++i) {
        ps.load(i) = meta.scaler.scale(s.load[static_cast<std::size_t>(i)]);
        ps.temperature(i) = p.temperature_scaler.scale(s.temperature[static_cast<std::size_t>(i)]);
        design_row(s.at(static_cast<std::size_t>(i)), meta.clock, p.config, lay, p.event_names, model_calendar(),
                   ps.design.row(i).data());
    }
    return ps;
}

/// One rolling-window sample: lags are hours [target - n_lags, target), the
/// forecast hours are [target, target + horizon).
struct SampleRef {
    std::uint32_t series = 0;  // index into the prepared pool
    std::uint32_t target = 0;
    double weight = 1.0;
};

/// Weighted pinball loss averaged over samples, horizon steps and quantiles
/// (divided by the sample count, not the weight sum). When `grad` is given it
/// receives the gradient with respect to `p.theta`.
inline double batch_loss(const HitsGamParams& p, const std::vector<PreparedSeries>& pool,
                         std::span<const SampleRef> batch, Vector* grad = nullptr) {
    if (batch.empty()) throw ModelError("empty batch");
    const auto& cfg = p.config;
    const auto lags = static_cast<Eigen::Index>(cfg.n_lags);
    const auto hz = static_cast<Eigen::Index>(cfg.horizon);
    const auto window = lags + hz;
    const auto nq = static_cast<Eigen::Index>(cfg.num_quantiles());
    const auto bsz = static_cast<Eigen::Index>(batch.size());
    const auto lay_size = static_cast<Eigen::Index>(p.local_layout().size());

    Matrix ar_in(lags, bsz), temp_in(hz, bsz), local_future(hz, bsz);
    for (Eigen::Index b = 0; b < bsz; ++b) {
        const auto& s = batch[static_cast<std::size_t>(b)];
        const auto& ps = pool[s.series];
        const Eigen::Index t = s.target;
        Eigen::Map<const Vector> beta(p.local(ps.bank), lay_size);
        const Vector local = ps.design.middleRows(t - lags, window) * beta;
        ar_in.col(b) = ps.load.segment(t - lags, lags) - local.head(lags);
        local_future.col(b) = local.tail(hz);
        temp_in.col(b) = ps.temperature.segment(t, hz);
    }

    const Mlp ar = p.ar_net(), tn = p.temperature_net();
    Mlp::Cache ar_cache, tn_cache;
    const Matrix ar_out = ar.forward(p.theta.data() + p.ar_offset(), ar_in, grad ? &ar_cache : nullptr);
    const Matrix tn_out = tn.forward(p.theta.data() + p.temperature_offset(), temp_in, grad ? &tn_cache : nullptr);

    const double norm = static_cast<double>(bsz * hz * nq);
    Matrix d_out(nq * hz, bsz);
    double loss = 0.0;
    for (Eigen::Index b = 0; b < bsz; ++b) {
        const auto& s = batch[static_cast<std::size_t>(b)];
        const auto& ps = pool[s.series];
        for (Eigen::Index q = 0; q < nq; ++q) {
            const double tau = cfg.quantiles[static_cast<std::size_t>(q)];
            for (Eigen::Index h = 0; h < hz; ++h) {
                const Eigen::Index o = q * hz + h;
                const double pred = local_future(h, b) + ar_out(o, b) + tn_out(o, b);
                const double actual = ps.load(static_cast<Eigen::Index>(s.target) + h);
                loss += s.weight * pinball_loss(actual, pred, tau);
                d_out(o, b) = s.weight * (actual >= pred ? -tau : 1.0 - tau) / norm;
            }
        }
    }
    loss /= norm;
    if (!grad) return loss;

    grad->setZero(p.theta.size());
    const Matrix d_ar_in = ar.backward(p.theta.data() + p.ar_offset(), ar_cache, d_out, grad->data() + p.ar_offset());
    tn.backward(p.theta.data() + p.temperature_offset(), tn_cache, d_out, grad->data() + p.temperature_offset());

    Vector g(window);
    for (Eigen::Index b = 0; b < bsz; ++b) {
        const auto& s = batch[static_cast<std::size_t>(b)];
        const auto& ps = pool[s.series];
        g.head(lags) = -d_ar_in.col(b);
        for (Eigen::Index h = 0; h < hz; ++h) {
            double acc = 0.0;
            for (Eigen::Index q = 0; q < nq; ++q) acc += d_out(q * hz + h, b);
            g(lags + h) = acc;
        }
        Eigen::Map<Vector> gbeta(grad->data() + p.local_offset(ps.bank), lay_size);
        gbeta.noalias() += ps.design.middleRows(static_cast<Eigen::Index>(s.target) - lags, window).transpose() * g;
    }
    return loss;
}

// ---- inference -----------------------------------------------------------------------------

/// Day-ahead forecast from `origin`, the last observed hour. `history` must
/// hold the n_lags hours ending at `origin`; `future_temps` are the horizon
/// temperatures (degF) for origin+1 .. origin+horizon.
inline ForecastBundle forecast(const HitsGamParams& p, const std::string& id, Timestamp origin,
                               const LoadSeries& history, std::span<const double> future_temps) {
    const auto& cfg = p.config;
    const std::size_t bank = p.bank_of(id);
    const auto& meta = p.series[bank];
    const auto lay = p.local_layout();
    const std::size_t lags = cfg.n_lags, hz = cfg.horizon, nq = cfg.num_quantiles();
    if (future_temps.size() != hz) throw ModelError("future temperature length mismatch");
    const Timestamp first = origin - static_cast<std::int64_t>(lags - 1);
    if (!history.contains(first) || !history.contains(origin)) {
        throw ModelError("insufficient history for series '" + id + "' at " + format_timestamp(origin));
    }

    const std::size_t window = lags + hz;
    RowMatrix design(static_cast<Eigen::Index>(window), static_cast<Eigen::Index>(lay.size()));
    for (std::size_t i = 0; i < window; ++i) {
        design_row(first + static_cast<std::int64_t>(i), meta.clock, cfg, lay, p.event_names, model_calendar(),
                   design.row(static_cast<Eigen::Index>(i)).data());
    }
    const double* beta = p.local(bank);
    auto block = [&](std::size_t row, std::size_t from, std::size_t n) {
        double s = 0.0;
        for (std::size_t c = from; c < from + n; ++c) s += design(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(c)) * beta[c];
        return s;
    };

    std::vector<double> lag_window(lags);
    const std::size_t off = history.index_of(first);
    for (std::size_t i = 0; i < lags; ++i) {
        const double y = history.load[off + i];
        if (is_missing(y)) throw ModelError("missing value in lag window for series '" + id + "'");
        lag_window[i] = meta.scaler.scale(y) - (block(i, 0, lay.size()));
    }
    std::vector<double> temps(hz);
    for (std::size_t h = 0; h < hz; ++h) temps[h] = p.temperature_scaler.scale(future_temps[h]);

    const Matrix ar = ar_forward(p, lag_window);
    const Matrix tp = temperature_forward(p, temps);

    ForecastBundle fb;
    fb.series = meta.id;
    fb.origin = origin;
    fb.model = "hitsgam";
    fb.step_offset = 1;
    fb.quantiles = cfg.quantiles;
    fb.values.assign(nq, std::vector<double>(hz));
    for (const auto& n : component_names()) fb.components[n].assign(hz, 0.0);

    const double sd = meta.scaler.sd, mu = meta.scaler.mean;
    const std::size_t med = cfg.median_index();
    std::vector<double> raw(nq);
    std::vector<std::size_t> order(nq);
    for (std::size_t h = 0; h < hz; ++h) {
        const std::size_t row = lags + h;
        const double trend = block(row, lay.trend_begin(), lay.trend_size()) * sd + mu;
        const double season = block(row, lay.season_begin(), lay.season_size()) * sd;
        const double events = block(row, lay.events_begin(), lay.events) * sd;
        for (std::size_t q = 0; q < nq; ++q) {
            raw[q] = trend + season + events + ar(static_cast<Eigen::Index>(q), static_cast<Eigen::Index>(h)) * sd +
                     tp(static_cast<Eigen::Index>(q), static_cast<Eigen::Index>(h)) * sd;
        }
        // Crossing repair: sort per hour. The median slot's decomposition is
        // taken from whichever quantile head supplied its value.
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return raw[a] < raw[b]; });
        for (std::size_t q = 0; q < nq; ++q) fb.values[q][h] = raw[order[q]];
        const auto src = static_cast<Eigen::Index>(order[med]);
        fb.components["trend"][h] = trend;
        fb.components["seasonality"][h] = season;
        fb.components["events"][h] = events;
        fb.components["autoregression"][h] = ar(src, static_cast<Eigen::Index>(h)) * sd;
        fb.components["temperature"][h] = tp(src, static_cast<Eigen::Index>(h)) * sd;
    }
    return fb;
}

}  // namespace gridcast::model

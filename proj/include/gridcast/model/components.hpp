#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

#include "gridcast/core/time.hpp"
#include "gridcast/data/calendar.hpp"
#include "gridcast/model/config.hpp"

namespace gridcast::model {

inline constexpr double kYearHours = 365.25 * 24.0;
inline constexpr double kWeekHours = 168.0;
inline constexpr double kDayHours = 24.0;

/// [sin(2*pi*j*tau/period), cos(2*pi*j*tau/period)] for j = 1..order, with
/// tau the hours since the epoch reduced modulo the period.
inline std::vector<double> fourier_features(Timestamp t, double period, std::size_t order) {
    double tau = std::fmod(static_cast<double>(t.hours), period);
    if (tau < 0.0) tau += period;
    std::vector<double> f(2 * order);
    for (std::size_t j = 1; j <= order; ++j) {
        const double arg = 2.0 * std::numbers::pi * static_cast<double>(j) * tau / period;
        f[2 * (j - 1)] = std::sin(arg);
        f[2 * (j - 1) + 1] = std::cos(arg);
    }
    return f;
}

inline bool is_summer(Timestamp t, const HitsGamConfig& cfg) {
    const unsigned m = civil(t).month;
    return m >= cfg.summer_first_month && m <= cfg.summer_last_month;
}

/// Column layout of one series' local bank and the matching design row.
struct LocalLayout {
    std::size_t changepoints = 0;
    std::size_t yearly = 0, weekly = 0, daily = 0;
    std::size_t events = 0;

    LocalLayout() = default;
    LocalLayout(const HitsGamConfig& cfg, std::size_t n_events)
        : changepoints(cfg.n_changepoints),
          yearly(cfg.yearly_order),
          weekly(cfg.weekly_order),
          daily(cfg.daily_order),
          events(n_events) {}

    std::size_t trend_begin() const { return 0; }
    std::size_t trend_size() const { return 2 + changepoints; }
    std::size_t yearly_begin() const { return trend_size(); }
    std::size_t weekly_begin() const { return yearly_begin() + 2 * yearly; }
    std::size_t summer_begin() const { return weekly_begin() + 2 * weekly; }
    std::size_t winter_begin() const { return summer_begin() + 2 * daily; }
    std::size_t season_begin() const { return yearly_begin(); }
    std::size_t season_size() const { return 2 * (yearly + weekly + 2 * daily); }
    std::size_t events_begin() const { return season_begin() + season_size(); }
    std::size_t size() const { return events_begin() + events; }
};

/// Changepoint locations in normalized training time, spread over the first
/// 80% of the training window.
inline double changepoint_location(std::size_t j, std::size_t n) {
    return 0.8 * static_cast<double>(j + 1) / static_cast<double>(n + 1);
}

/// Per-series time reference for the trend.
struct TrendClock {
    Timestamp start;
    std::size_t train_hours = 1;

    double normalized(Timestamp t) const {
        return static_cast<double>(t - start) / static_cast<double>(train_hours);
    }
};

/// Fills `row` (size layout.size()) with the regressors of hour t.
inline void design_row(Timestamp t, const TrendClock& clock, const HitsGamConfig& cfg, const LocalLayout& lay,
                       const std::vector<std::string>& event_names, const data::HolidayCalendar& cal,
                       double* row) {
    const double tn = clock.normalized(t);
    row[0] = 1.0;
    row[1] = tn;
    for (std::size_t j = 0; j < lay.changepoints; ++j) {
        row[2 + j] = std::max(0.0, tn - changepoint_location(j, lay.changepoints));
    }
    auto put = [&](std::size_t at, const std::vector<double>& f) {
        for (std::size_t i = 0; i < f.size(); ++i) row[at + i] = f[i];
    };
    put(lay.yearly_begin(), fourier_features(t, kYearHours, lay.yearly));
    put(lay.weekly_begin(), fourier_features(t, kWeekHours, lay.weekly));
    const auto daily = fourier_features(t, kDayHours, lay.daily);
    const bool summer = is_summer(t, cfg);
    for (std::size_t i = 0; i < daily.size(); ++i) {
        row[lay.summer_begin() + i] = summer ? daily[i] : 0.0;
        row[lay.winter_begin() + i] = summer ? 0.0 : daily[i];
    }
    for (std::size_t e = 0; e < lay.events; ++e) row[lay.events_begin() + e] = 0.0;
    for (const auto& name : cal.on(t)) {
        for (std::size_t e = 0; e < event_names.size(); ++e) {
            if (event_names[e] == name) row[lay.events_begin() + e] += 1.0;
        }
    }
}

}  // namespace gridcast::model

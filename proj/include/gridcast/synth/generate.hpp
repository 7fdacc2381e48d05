#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "gridcast/core/error.hpp"
#include "gridcast/core/rng.hpp"
#include "gridcast/core/time.hpp"
#include "gridcast/core/types.hpp"
#include "gridcast/data/calendar.hpp"

namespace gridcast::synth {

/// Per-archetype response sizes. Amplitudes and the holiday offset are
/// fractions of the bus base load; slope multipliers scale the spec slopes.
struct ArchetypeProfile {
    std::string name;
    double daily_amplitude = 0.0;
    double weekly_amplitude = 0.0;
    double yearly_amplitude = 0.0;
    double heating_multiplier = 1.0;
    double cooling_multiplier = 1.0;
    double holiday_offset = 0.0;
};

inline std::vector<ArchetypeProfile> default_archetypes() {
    return {
        {"residential", 0.22, 0.04, 0.03, 1.0, 1.0, 0.03},
        {"commercial", 0.32, 0.28, 0.02, 0.6, 1.3, -0.25},
        {"industrial", 0.07, 0.14, 0.01, 0.25, 0.35, -0.15},
    };
}

struct TemperatureSpec {
    double mean = 55.0;              // degF
    double yearly_amplitude = 22.0;  // coldest mid-January
    double daily_amplitude = 7.0;    // warmest mid-afternoon
    double anomaly_phi = 0.985;      // hourly AR(1) weather anomaly
    double anomaly_sigma = 0.45;
};

struct SynthSpec {
    std::size_t n_buses = 20;
    std::size_t hours = 2 * 8760;
    std::uint64_t seed = 7;
    Timestamp start = make_timestamp(2019, 1, 1, 0);
    std::string utility_id = "U1";
    double base_min = 20.0;  // MW
    double base_max = 120.0;
    TemperatureSpec temperature;
    double breakpoint = 57.0;     // degF
    double heating_slope = 0.45;  // MW/degF below the breakpoint, for a bus of mean base
    double cooling_slope = 0.8;   // MW/degF above the breakpoint
    double trend_per_year = 0.01; // fraction of base
    double noise_sigma = 1.5;     // MW, AR(1) innovation
    double ar_phi = 0.7;
    double utility_factor = 1.02;
    double utility_noise_sigma = 4.0;  // MW
    double drift_rate = 0.3;           // share change over the full span, alternating sign
    double profile_mix = 0.0;          // 0 = pure archetypes
    double amplitude_jitter = 0.1;
    std::vector<ArchetypeProfile> archetypes = default_archetypes();

    void validate() const {
        if (n_buses == 0 || hours == 0) throw ValidationError("synth counts must be positive");
        if (archetypes.empty()) throw ValidationError("synth needs at least one archetype");
        if (!(base_min > 0.0) || base_max < base_min) throw ValidationError("invalid base load range");
        if (noise_sigma < 0.0 || utility_noise_sigma < 0.0) throw ValidationError("noise must be non-negative");
        if (profile_mix < 0.0 || profile_mix > 1.0) throw ValidationError("profile_mix must be in [0, 1]");
        if (std::abs(ar_phi) >= 1.0 || std::abs(temperature.anomaly_phi) >= 1.0) {
            throw ValidationError("AR coefficients must lie in (-1, 1)");
        }
    }
};

/// Noise-free structure of one generated bus.
struct BusTruth {
    SeriesId id;
    std::size_t archetype = 0;
    double base = 0.0;
    double heating_slope = 0.0;
    double cooling_slope = 0.0;
    double drift = 0.0;
    std::array<double, 3> mixture{};  // weight per archetype shape
    std::vector<double> temperature_response;
    std::vector<double> seasonality;
    std::vector<double> events;
    std::vector<double> noise_free;
};

struct SynthResult {
    LoadSeries utility;
    std::vector<LoadSeries> buses;
    Hierarchy hierarchy;  // proportions from noise-free means over the first 80%
    std::vector<BusTruth> truth;
};

namespace shapes {

inline double bump(double h, double centre, double width) {
    double d = std::abs(h - centre);
    d = std::min(d, 24.0 - d);
    return std::exp(-0.5 * (d / width) * (d / width));
}

inline double plateau(double h, double from, double to, double edge) {
    return 1.0 / (1.0 + std::exp(-(h - from) / edge)) - 1.0 / (1.0 + std::exp(-(h - to) / edge));
}

/// Zero-mean daily shapes scaled to unit peak, one per archetype.
inline std::array<double, 24> daily(std::size_t archetype, bool summer) {
    std::array<double, 24> s{};
    for (int h = 0; h < 24; ++h) {
        const auto x = static_cast<double>(h);
        switch (archetype % 3) {
            case 0:  // evening peak in summer, morning and evening peaks in winter
                s[h] = summer ? bump(x, 17.5, 3.0) + 0.3 * bump(x, 8.0, 2.0)
                              : 0.8 * bump(x, 7.5, 1.8) + bump(x, 19.0, 2.2);
                break;
            case 1:  // business-hours plateau
                s[h] = summer ? plateau(x, 7.5, 18.5, 0.8) + 0.3 * bump(x, 15.0, 2.5)
                              : plateau(x, 7.0, 17.5, 0.7) + 0.25 * bump(x, 8.0, 1.2);
                break;
            default:  // two-shift operation
                s[h] = summer ? plateau(x, 6.0, 22.0, 0.4) : plateau(x, 6.0, 22.0, 0.4) + 0.1 * bump(x, 7.0, 1.0);
                break;
        }
    }
    double mean = 0.0;
    for (double v : s) mean += v / 24.0;
    double peak = 0.0;
    for (double& v : s) {
        v -= mean;
        peak = std::max(peak, std::abs(v));
    }
    for (double& v : s) v /= peak;
    return s;
}

/// Day-of-week weights (0 = Sunday); weekdays 0, weekends carry the effect.
inline std::array<double, 7> weekly(std::size_t archetype) {
    switch (archetype % 3) {
        case 0: return {1.0, -0.1, 0.0, 0.0, 0.0, -0.05, 0.8};
        case 1: return {-1.0, 0.05, 0.1, 0.1, 0.1, 0.0, -0.8};
        default: return {-1.0, 0.0, 0.1, 0.1, 0.1, 0.1, -0.6};
    }
}

}  // namespace shapes

inline double hinge(double temp, double breakpoint, double heating, double cooling) {
    return temp < breakpoint ? heating * (breakpoint - temp) : cooling * (temp - breakpoint);
}

inline std::vector<double> temperature_path(const SynthSpec& spec, Rng& rng) {
    const auto& ts = spec.temperature;
    std::vector<double> out(spec.hours);
    double anomaly = 0.0;
    for (std::size_t i = 0; i < spec.hours; ++i) {
        const Timestamp t = spec.start + static_cast<std::int64_t>(i);
        const double year_pos = static_cast<double>(t.hours % 8766) / 8766.0;
        const int h = hour_of_day(t);
        anomaly = ts.anomaly_phi * anomaly + ts.anomaly_sigma * rng.normal();
        out[i] = ts.mean - ts.yearly_amplitude * std::cos(2.0 * std::numbers::pi * (year_pos - 15.0 / 365.25)) +
                 ts.daily_amplitude * std::cos(2.0 * std::numbers::pi * (h - 15) / 24.0) + anomaly;
    }
    return out;
}

/// Deterministic multi-level dataset for a given spec and seed.
inline SynthResult generate(const SynthSpec& spec) {
    spec.validate();
    Rng rng(spec.seed);
    const std::size_t nb = spec.n_buses;
    const std::size_t na = spec.archetypes.size();

    std::vector<BusTruth> truth(nb);
    double base_sum = 0.0;
    for (std::size_t i = 0; i < nb; ++i) {
        BusTruth& b = truth[i];
        b.id = {"B" + std::string(i + 1 < 10 ? "0" : "") + std::to_string(i + 1), Level::Bus};
        b.archetype = i % na;
        b.base = rng.uniform(spec.base_min, spec.base_max);
        b.drift = spec.drift_rate * (i % 2 == 0 ? 1.0 : -1.0);
        std::array<double, 3> blend{rng.uniform(), rng.uniform(), rng.uniform()};
        const double bs = blend[0] + blend[1] + blend[2];
        for (std::size_t a = 0; a < 3; ++a) {
            const double own = (a == b.archetype % 3) ? 1.0 : 0.0;
            b.mixture[a] = (1.0 - spec.profile_mix) * own + spec.profile_mix * blend[a] / bs;
        }
        base_sum += b.base;
    }
    const double mean_base = base_sum / static_cast<double>(nb);
    std::vector<double> jitter(nb);
    for (std::size_t i = 0; i < nb; ++i) {
        jitter[i] = 1.0 + spec.amplitude_jitter * rng.uniform(-1.0, 1.0);
        const auto& arch = spec.archetypes[truth[i].archetype];
        truth[i].heating_slope = spec.heating_slope * arch.heating_multiplier * truth[i].base / mean_base;
        truth[i].cooling_slope = spec.cooling_slope * arch.cooling_multiplier * truth[i].base / mean_base;
    }

    const std::vector<double> temp = temperature_path(spec, rng);
    const auto cal = data::HolidayCalendar::federal_around(spec.start, spec.start + static_cast<std::int64_t>(spec.hours));

    std::array<std::array<double, 24>, 3> summer{}, winter{};
    std::array<std::array<double, 7>, 3> week{};
    for (std::size_t a = 0; a < 3; ++a) {
        summer[a] = shapes::daily(a, true);
        winter[a] = shapes::daily(a, false);
        week[a] = shapes::weekly(a);
    }

    SynthResult res;
    const double span_years = static_cast<double>(spec.hours) / 8766.0;
    for (std::size_t i = 0; i < nb; ++i) {
        BusTruth& b = truth[i];
        const auto& arch = spec.archetypes[b.archetype];
        LoadSeries s;
        s.series = b.id;
        s.start = spec.start;
        s.temperature = temp;
        s.load.resize(spec.hours);
        b.temperature_response.resize(spec.hours);
        b.seasonality.resize(spec.hours);
        b.events.resize(spec.hours);
        b.noise_free.resize(spec.hours);
        double noise = 0.0;
        const double stationary = spec.noise_sigma / std::sqrt(1.0 - spec.ar_phi * spec.ar_phi);
        for (std::size_t k = 0; k < spec.hours; ++k) {
            const Timestamp t = spec.start + static_cast<std::int64_t>(k);
            const CivilHour c = civil(t);
            const bool is_summer = c.month >= 4 && c.month <= 9;
            double day = 0.0, wk = 0.0;
            for (std::size_t a = 0; a < 3; ++a) {
                day += b.mixture[a] * (is_summer ? summer[a][c.hour] : winter[a][c.hour]);
                wk += b.mixture[a] * week[a][c.weekday];
            }
            const double year_pos = static_cast<double>(t.hours % 8766) / 8766.0;
            const double seasonal =
                b.base * jitter[i] *
                (arch.daily_amplitude * day + arch.weekly_amplitude * wk +
                 arch.yearly_amplitude * std::cos(2.0 * std::numbers::pi * (year_pos - 0.55)));
            const double tr = hinge(temp[k], spec.breakpoint, b.heating_slope, b.cooling_slope);
            const double ev = cal.on(t).empty() ? 0.0 : arch.holiday_offset * b.base;
            const double years = static_cast<double>(k) / 8766.0;
            const double level = b.base * (1.0 + spec.trend_per_year * years);
            const double drift = std::max(0.1, 1.0 + b.drift * years / span_years);
            noise = k == 0 ? stationary * rng.normal() : spec.ar_phi * noise + spec.noise_sigma * rng.normal();
            b.seasonality[k] = seasonal;
            b.temperature_response[k] = tr;
            b.events[k] = ev;
            b.noise_free[k] = std::max(0.0, drift * (level + seasonal + tr + ev));
            s.load[k] = std::max(0.0, drift * (level + seasonal + tr + ev) + noise);
        }
        res.buses.push_back(std::move(s));
    }

    res.utility.series = {spec.utility_id, Level::Utility};
    res.utility.start = spec.start;
    res.utility.temperature = temp;
    res.utility.load.assign(spec.hours, 0.0);
    for (std::size_t k = 0; k < spec.hours; ++k) {
        double sum = 0.0;
        for (const auto& s : res.buses) sum += s.load[k];
        res.utility.load[k] = std::max(0.0, spec.utility_factor * sum + spec.utility_noise_sigma * rng.normal());
    }

    res.hierarchy.utility = res.utility.series;
    const auto n_train = static_cast<std::size_t>(std::floor(0.8 * static_cast<double>(spec.hours) + 1e-9));
    std::vector<double> means(nb, 0.0);
    double total = 0.0;
    for (std::size_t i = 0; i < nb; ++i) {
        for (std::size_t k = 0; k < n_train; ++k) means[i] += truth[i].noise_free[k];
        total += means[i];
    }
    for (std::size_t i = 0; i < nb; ++i) {
        res.hierarchy.buses.push_back(truth[i].id);
        res.hierarchy.proportions[truth[i].id.id] = total > 0.0 ? means[i] / total : 1.0 / static_cast<double>(nb);
    }
    res.hierarchy.agg_scale = spec.utility_factor;
    res.truth = std::move(truth);
    return res;
}

}  // namespace gridcast::synth

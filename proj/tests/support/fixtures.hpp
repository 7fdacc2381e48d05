#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "gridcast/core/rng.hpp"
#include "gridcast/core/types.hpp"

namespace fixtures {

using namespace gridcast;

inline LoadSeries make_series(const std::string& id, Level level, Timestamp start, std::vector<double> load,
                              double temp = 60.0) {
    LoadSeries s;
    s.series = {id, level};
    s.start = start;
    s.temperature.assign(load.size(), temp);
    s.load = std::move(load);
    return s;
}

/// Daily sinusoid plus noise; enough structure for a model to learn.
inline LoadSeries daily_series(const std::string& id, Level level, Timestamp start, std::size_t hours,
                               double base, double amp, double noise, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> load(hours), temp(hours);
    for (std::size_t i = 0; i < hours; ++i) {
        const double h = static_cast<double>((start.hours + static_cast<std::int64_t>(i)) % 24);
        temp[i] = 55.0 + 10.0 * std::sin(2.0 * std::numbers::pi * (h - 9.0) / 24.0) + rng.normal();
        load[i] = base + amp * std::sin(2.0 * std::numbers::pi * (h - 6.0) / 24.0) + 0.2 * std::abs(temp[i] - 57.0) +
                  noise * rng.normal();
    }
    LoadSeries s;
    s.series = {id, level};
    s.start = start;
    s.load = std::move(load);
    s.temperature = std::move(temp);
    return s;
}

}  // namespace fixtures

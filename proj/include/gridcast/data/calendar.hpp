#pragma once

#include <algorithm>
#include <array>
#include <chrono>
#include <map>
#include <string>
#include <vector>

#include "gridcast/core/time.hpp"

namespace gridcast::data {

inline const std::vector<std::string>& federal_holiday_names() {
    static const std::vector<std::string> names = {
        "new_years_day", "mlk_day",      "presidents_day", "memorial_day", "independence_day",
        "labor_day",     "columbus_day", "veterans_day",   "thanksgiving", "christmas"};
    return names;
}

/// Date-keyed holiday table. A date has one entry that may carry several
/// holiday names.
class HolidayCalendar {
public:
    void add(std::chrono::sys_days date, const std::string& name) {
        auto& names = by_date_[date.time_since_epoch().count()];
        if (std::find(names.begin(), names.end(), name) == names.end()) names.push_back(name);
    }

    const std::vector<std::string>& on(std::chrono::sys_days date) const {
        static const std::vector<std::string> none;
        auto it = by_date_.find(date.time_since_epoch().count());
        return it == by_date_.end() ? none : it->second;
    }

    const std::vector<std::string>& on(Timestamp t) const { return on(to_sys_days(t)); }

    std::size_t size() const { return by_date_.size(); }

    /// The ten fixed-rule U.S. federal holidays for [first_year, last_year],
    /// on their nominal dates (no weekend observance shift).
    static HolidayCalendar federal(int first_year, int last_year) {
        using namespace std::chrono;
        HolidayCalendar cal;
        const auto& n = federal_holiday_names();
        for (int y = first_year; y <= last_year; ++y) {
            const year yr{y};
            cal.add(sys_days{yr / January / 1}, n[0]);
            cal.add(sys_days{yr / January / Monday[3]}, n[1]);
            cal.add(sys_days{yr / February / Monday[3]}, n[2]);
            cal.add(sys_days{yr / May / Monday[last]}, n[3]);
            cal.add(sys_days{yr / July / 4}, n[4]);
            cal.add(sys_days{yr / September / Monday[1]}, n[5]);
            cal.add(sys_days{yr / October / Monday[2]}, n[6]);
            cal.add(sys_days{yr / November / 11}, n[7]);
            cal.add(sys_days{yr / November / Thursday[4]}, n[8]);
            cal.add(sys_days{yr / December / 25}, n[9]);
        }
        return cal;
    }

    /// Federal calendar spanning every year that may be touched by a model
    /// (data years plus one either side for horizon overrun).
    static HolidayCalendar federal_around(Timestamp from, Timestamp to) {
        return federal(civil(from).year - 1, civil(to).year + 1);
    }

private:
    std::map<long, std::vector<std::string>> by_date_;
};

}  // namespace gridcast::data

#ifndef CENSEG_DATE_HPP
#define CENSEG_DATE_HPP

#include <cstdint>
#include <string>
#include <string_view>

#include "censeg/error.hpp"

namespace censeg {

// Calendar day, stored as days since 1970-01-01 (UTC, proleptic Gregorian).
using Day = std::int32_t;

// Days-from-civil / civil-from-days, valid over the whole int32 range.
constexpr Day days_from_civil(int y, unsigned m, unsigned d) noexcept {
    y -= m <= 2;
    const int era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return static_cast<Day>(era * 146097 + static_cast<int>(doe) - 719468);
}

constexpr void civil_from_days(Day z, int& y, unsigned& m, unsigned& d) noexcept {
    z += 719468;
    const int era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const int yr = static_cast<int>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = doy - (153 * mp + 2) / 5 + 1;
    m = mp + (mp < 10 ? 3 : -9);
    y = yr + (m <= 2);
}

// Parses "YYYY-MM-DD"; a trailing time part ("T..." or " ...") is truncated.
Day parse_date(std::string_view s);

// "YYYY-MM-DD"
std::string format_date(Day d);

}  // namespace censeg

#endif

// Calendar dates without time zones. Quarter boundaries follow calendar
// months; trading-day calendars are not modeled.
#pragma once

#include <compare>
#include <string>

namespace scorebench {

struct Date {
    int year = 1970;
    int month = 1;  // 1..12
    int day = 1;    // 1..31

    auto operator<=>(const Date&) const = default;

    int quarter() const { return (month - 1) / 3 + 1; }

    // Days since 1970-01-01 (proleptic Gregorian).
    long serial() const;
    static Date from_serial(long days);

    // 0 = Monday .. 6 = Sunday.
    int weekday() const;

    std::string iso() const;  // YYYY-MM-DD
};

// Parses strict ISO-8601 YYYY-MM-DD; throws Err::UnparseableDate otherwise.
Date parse_date(const std::string& text);

// Next calendar day that is a weekday (Mon-Fri).
Date next_weekday(Date d);

}  // namespace scorebench

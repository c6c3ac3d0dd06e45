#include "scorebench/dates.hpp"

#include <cctype>
#include <cstdio>

#include "scorebench/errors.hpp"

namespace scorebench {

namespace {

bool is_leap(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

int days_in_month(int y, int m) {
    static const int lens[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (m == 2 && is_leap(y)) return 29;
    return lens[m - 1];
}

}  // namespace

long Date::serial() const {
    // Howard Hinnant's days-from-civil algorithm.
    int y = year;
    int m = month;
    int d = day;
    y -= m <= 2;
    long era = (y >= 0 ? y : y - 399) / 400;
    unsigned yoe = static_cast<unsigned>(y - era * 400);
    unsigned doy = (153u * static_cast<unsigned>(m + (m > 2 ? -3 : 9)) + 2u) / 5u +
                   static_cast<unsigned>(d) - 1u;
    unsigned doe = yoe * 365u + yoe / 4u - yoe / 100u + doy;
    return era * 146097L + static_cast<long>(doe) - 719468L;
}

Date Date::from_serial(long days) {
    long z = days + 719468L;
    long era = (z >= 0 ? z : z - 146096L) / 146097L;
    unsigned doe = static_cast<unsigned>(z - era * 146097L);
    unsigned yoe = (doe - doe / 1460u + doe / 36524u - doe / 146096u) / 365u;
    long y = static_cast<long>(yoe) + era * 400L;
    unsigned doy = doe - (365u * yoe + yoe / 4u - yoe / 100u);
    unsigned mp = (5u * doy + 2u) / 153u;
    unsigned d = doy - (153u * mp + 2u) / 5u + 1u;
    unsigned m = mp + (mp < 10 ? 3u : static_cast<unsigned>(-9));
    return Date{static_cast<int>(y + (m <= 2)), static_cast<int>(m), static_cast<int>(d)};
}

int Date::weekday() const {
    long s = serial();
    // 1970-01-01 was a Thursday (weekday 3 with Monday = 0).
    return static_cast<int>(((s % 7) + 7 + 3) % 7);
}

std::string Date::iso() const {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", year, month, day);
    return buf;
}

Date parse_date(const std::string& text) {
    if (text.size() != 10 || text[4] != '-' || text[7] != '-')
        fail(Err::UnparseableDate, "expected YYYY-MM-DD, got '" + text + "'");
    for (int i : {0, 1, 2, 3, 5, 6, 8, 9})
        if (!std::isdigit(static_cast<unsigned char>(text[i])))
            fail(Err::UnparseableDate, "expected YYYY-MM-DD, got '" + text + "'");
    Date d;
    d.year = std::stoi(text.substr(0, 4));
    d.month = std::stoi(text.substr(5, 2));
    d.day = std::stoi(text.substr(8, 2));
    if (d.month < 1 || d.month > 12 || d.day < 1 || d.day > days_in_month(d.year, d.month))
        fail(Err::UnparseableDate, "invalid calendar date '" + text + "'");
    return d;
}

Date next_weekday(Date d) {
    Date n = Date::from_serial(d.serial() + 1);
    while (n.weekday() >= 5) n = Date::from_serial(n.serial() + 1);
    return n;
}

}  // namespace scorebench

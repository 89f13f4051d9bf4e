#include "league/date.hpp"

#include <cstdio>

#include "league/errors.hpp"

namespace league {

namespace {

bool leap(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

int days_in_month(int y, int m) {
    static const int table[12] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (m == 2 && leap(y)) return 29;
    return table[m - 1];
}

}  // namespace

bool Date::valid() const {
    if (year < 1 || month < 1 || month > 12) return false;
    return day >= 1 && day <= days_in_month(year, month);
}

std::string Date::to_string() const {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", year, month, day);
    return buf;
}

Date Date::parse(std::string_view text) {
    Date d;
    int consumed = 0;
    std::string head(text.substr(0, text.size() < 10 ? text.size() : 10));
    if (std::sscanf(head.c_str(), "%d-%d-%d%n", &d.year, &d.month, &d.day, &consumed) != 3 ||
        consumed != static_cast<int>(head.size()) || !d.valid()) {
        raise(ErrorCode::malformed_response, "unparseable date '" + std::string(text) + "'");
    }
    return d;
}

}  // namespace league

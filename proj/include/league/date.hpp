#pragma once

#include <compare>
#include <string>
#include <string_view>

namespace league {

// Calendar date (UTC), day resolution. Paper publication timestamps are
// truncated to the date part.
struct Date {
    int year = 0;
    int month = 0;
    int day = 0;

    auto operator<=>(const Date&) const = default;

    bool valid() const;
    std::string to_string() const;  // YYYY-MM-DD

    // Accepts "YYYY-MM-DD" and ISO-8601 timestamps ("YYYY-MM-DDThh:mm:ssZ").
    static Date parse(std::string_view text);
};

}  // namespace league

#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace covote {

// Calendar day stored as a count of days since 1970-01-01.
// Comparison, difference, and day stepping are plain integer arithmetic.
struct Date {
    std::int32_t days = 0;

    constexpr auto operator<=>(const Date&) const = default;

    Date next() const { return Date{days + 1}; }

    // Strict ISO "YYYY-MM-DD"; rejects impossible calendar dates.
    static std::optional<Date> parse(std::string_view text);
    static Date from_ymd(int year, unsigned month, unsigned day);

    std::string to_string() const;
};

} // namespace covote

#pragma once

#include <chrono>
#include <compare>
#include <string>
#include <string_view>

namespace skplane {

using Date = std::chrono::sys_days;

/// Parses a strict YYYY-MM-DD calendar date. Returns false on any deviation.
[[nodiscard]] bool parse_date(std::string_view text, Date& out);

/// Throwing variant of parse_date.
[[nodiscard]] Date make_date(std::string_view text);

[[nodiscard]] std::string format_date(Date date);

/// ISO-8601 week: weeks start on Monday and week 1 holds the year's first
/// Thursday, so early-January days can belong to the previous ISO year.
struct IsoWeek {
    int year = 0;
    unsigned week = 0;

    auto operator<=>(const IsoWeek&) const = default;
};

[[nodiscard]] IsoWeek iso_week(Date date);

/// Monday of the ISO week containing `date`.
[[nodiscard]] Date week_monday(Date date);

/// "2019-W14" style rendering.
[[nodiscard]] std::string format_iso_week(IsoWeek week);
[[nodiscard]] bool parse_iso_week(std::string_view text, IsoWeek& out);

}  // namespace skplane

#include "skplane/date.hpp"

#include <charconv>
#include <cstdio>

#include "skplane/error.hpp"

namespace skplane {

namespace {

bool parse_digits(std::string_view text, int& out) {
    if (text.empty()) {
        return false;
    }
    for (char c : text) {
        if (c < '0' || c > '9') {
            return false;
        }
    }
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
    return ec == std::errc{} && ptr == text.data() + text.size();
}

}  // namespace

bool parse_date(std::string_view text, Date& out) {
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') {
        return false;
    }
    int y = 0;
    int m = 0;
    int d = 0;
    if (!parse_digits(text.substr(0, 4), y) || !parse_digits(text.substr(5, 2), m) ||
        !parse_digits(text.substr(8, 2), d)) {
        return false;
    }
    const std::chrono::year_month_day ymd{std::chrono::year{y},
                                          std::chrono::month{static_cast<unsigned>(m)},
                                          std::chrono::day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) {
        return false;
    }
    out = Date{ymd};
    return true;
}

Date make_date(std::string_view text) {
    Date out{};
    if (!parse_date(text, out)) {
        throw Error(ErrorCode::InvalidArgument, "not a YYYY-MM-DD date: '" + std::string(text) + "'");
    }
    return out;
}

std::string format_date(Date date) {
    const std::chrono::year_month_day ymd{date};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

Date week_monday(Date date) {
    const std::chrono::weekday wd{date};
    // iso_encoding: Monday = 1 ... Sunday = 7
    return date - std::chrono::days{wd.iso_encoding() - 1};
}

IsoWeek iso_week(Date date) {
    const Date thursday = week_monday(date) + std::chrono::days{3};
    const std::chrono::year_month_day thu{thursday};
    const Date jan1 = Date{thu.year() / std::chrono::January / 1};
    const auto ordinal = (thursday - jan1).count();
    return IsoWeek{static_cast<int>(thu.year()), static_cast<unsigned>(ordinal / 7 + 1)};
}

std::string format_iso_week(IsoWeek week) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-W%02u", week.year, week.week);
    return buf;
}

bool parse_iso_week(std::string_view text, IsoWeek& out) {
    if (text.size() != 8 || text[4] != '-' || text[5] != 'W') {
        return false;
    }
    int y = 0;
    int w = 0;
    if (!parse_digits(text.substr(0, 4), y) || !parse_digits(text.substr(6, 2), w) || w < 1 || w > 53) {
        return false;
    }
    out = IsoWeek{y, static_cast<unsigned>(w)};
    return true;
}

}  // namespace skplane

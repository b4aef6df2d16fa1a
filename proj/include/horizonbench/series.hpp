#pragma once

#include <charconv>
#include <chrono>
#include <cstdio>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "horizonbench/errors.hpp"

namespace horizonbench {

/// Trading day. Intraday time components are discarded on ingest.
using Date = std::chrono::sys_days;

/// A single named value column with its date index.
///
/// `dates` is either empty (synthetic, index-only data) or the same length
/// as `values`. Models operate on the observation index; dates only travel
/// along for reporting and chronology checks.
struct Series {
    std::string name;
    std::vector<Date> dates;
    std::vector<double> values;

    std::size_t size() const noexcept { return values.size(); }
    bool empty() const noexcept { return values.empty(); }
    bool has_dates() const noexcept { return !dates.empty(); }
    std::span<const double> view() const noexcept { return values; }

    /// Rows [first, first + count) as a new series.
    Series slice(std::size_t first, std::size_t count) const {
        detail::require(first + count <= values.size(), "series slice out of range");
        Series out{name, {}, {values.begin() + first, values.begin() + first + count}};
        if (has_dates()) out.dates.assign(dates.begin() + first, dates.begin() + first + count);
        return out;
    }

    bool operator==(const Series&) const = default;
};

inline Series make_series(std::vector<double> values, std::string name = "value") {
    return Series{std::move(name), {}, std::move(values)};
}

// ---------------------------------------------------------------------------
// Text helpers shared by the CSV, config and report layers.

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r' || s.front() == '\n'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r' || s.back() == '\n'))
        s.remove_suffix(1);
    return s;
}

inline std::optional<double> parse_double(std::string_view text) {
    text = trim(text);
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    double value = 0.0;
    auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || end != text.data() + text.size() || text.empty()) return std::nullopt;
    return value;
}

template <class Int>
std::optional<Int> parse_integer(std::string_view text) {
    text = trim(text);
    Int value{};
    auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || end != text.data() + text.size() || text.empty()) return std::nullopt;
    return value;
}

/// Shortest decimal text that round-trips to the same double.
inline std::string format_double(double value) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, end);
}

/// Accepts `YYYY-MM-DD` optionally followed by ` HH:MM:SS` (or `T...`); the
/// time part is validated loosely and dropped.
inline std::optional<Date> parse_date(std::string_view text) {
    text = trim(text);
    if (text.size() < 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
    auto y = parse_integer<int>(text.substr(0, 4));
    auto m = parse_integer<unsigned>(text.substr(5, 2));
    auto d = parse_integer<unsigned>(text.substr(8, 2));
    if (!y || !m || !d) return std::nullopt;
    if (text.size() > 10) {
        if (text[10] != ' ' && text[10] != 'T') return std::nullopt;
        auto time = text.substr(11);
        if (time.size() < 5 || time[2] != ':') return std::nullopt;
    }
    std::chrono::year_month_day ymd{std::chrono::year{*y}, std::chrono::month{*m}, std::chrono::day{*d}};
    if (!ymd.ok()) return std::nullopt;
    return Date{ymd};
}

inline std::string format_date(Date date) {
    std::chrono::year_month_day ymd{date};
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

}  // namespace horizonbench

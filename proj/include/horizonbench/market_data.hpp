#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "horizonbench/errors.hpp"
#include "horizonbench/series.hpp"

namespace horizonbench {

/// One daily bar. Invariants: prices positive, low <= min(open, close),
/// high >= max(open, close).
struct OhlcvBar {
    Date date;
    double open = 0.0;
    double high = 0.0;
    double low = 0.0;
    double close = 0.0;
    double adj_close = 0.0;
    std::int64_t volume = 0;

    bool operator==(const OhlcvBar&) const = default;
};

/// Dated bars in strictly increasing date order.
struct TimeSeriesTable {
    std::string symbol;
    std::vector<OhlcvBar> bars;

    std::size_t size() const noexcept { return bars.size(); }
    bool empty() const noexcept { return bars.empty(); }

    bool operator==(const TimeSeriesTable&) const = default;
};

enum class Column { Open, High, Low, Close, AdjClose, Volume };

inline constexpr std::array<Column, 6> kNumericColumns{
    Column::Open, Column::High, Column::Low, Column::Close, Column::AdjClose, Column::Volume};

inline constexpr std::string_view column_name(Column c) {
    switch (c) {
        case Column::Open: return "Open";
        case Column::High: return "High";
        case Column::Low: return "Low";
        case Column::Close: return "Close";
        case Column::AdjClose: return "Adj Close";
        case Column::Volume: return "Volume";
    }
    return "?";
}

namespace detail {

inline std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
    return out;
}

inline double column_value(const OhlcvBar& bar, Column c) {
    switch (c) {
        case Column::Open: return bar.open;
        case Column::High: return bar.high;
        case Column::Low: return bar.low;
        case Column::Close: return bar.close;
        case Column::AdjClose: return bar.adj_close;
        case Column::Volume: return static_cast<double>(bar.volume);
    }
    return 0.0;
}

inline std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        auto pos = line.find(',', start);
        if (pos == std::string_view::npos) {
            fields.push_back(trim(line.substr(start)));
            break;
        }
        fields.push_back(trim(line.substr(start, pos - start)));
        start = pos + 1;
    }
    return fields;
}

/// Empty string when the bar satisfies the OHLC invariants.
inline std::string bar_violation(const OhlcvBar& b) {
    for (double p : {b.open, b.high, b.low, b.close, b.adj_close})
        if (!std::isfinite(p) || p <= 0.0) return "prices must be positive and finite";
    if (b.volume < 0) return "volume must be non-negative";
    if (b.low > b.high) return "low exceeds high";
    if (b.low > std::min(b.open, b.close)) return "low exceeds min(open, close)";
    if (b.high < std::max(b.open, b.close)) return "high below max(open, close)";
    return {};
}

}  // namespace detail

/// Case-insensitive lookup of one of the six numeric columns.
inline Column parse_column(std::string_view name) {
    auto key = detail::lower(trim(name));
    for (Column c : kNumericColumns)
        if (detail::lower(column_name(c)) == key) return c;
    if (key == "adj_close" || key == "adjclose") return Column::AdjClose;
    throw InputError("unknown column '" + std::string(name) + "'");
}

/// Parses a Date,Open,High,Low,Close,Adj Close,Volume document. Header
/// columns may appear in any order and any case; extra columns are ignored.
/// Rows come back sorted by date. Every rejected row is reported with its
/// 1-based line number.
inline TimeSeriesTable parse_ohlcv_csv(std::string_view text, std::string symbol = {}) {
    std::vector<std::string_view> lines;
    {
        std::size_t start = 0;
        while (start <= text.size()) {
            auto pos = text.find('\n', start);
            if (pos == std::string_view::npos) pos = text.size();
            lines.push_back(text.substr(start, pos - start));
            start = pos + 1;
        }
    }
    std::size_t header_line = 0;
    while (header_line < lines.size() && trim(lines[header_line]).empty()) ++header_line;
    if (header_line == lines.size()) throw ParseError(1, "missing header row");

    constexpr std::array<std::string_view, 7> required{"date", "open", "high", "low", "close", "adj close", "volume"};
    std::array<int, 7> index{};
    index.fill(-1);
    auto header = detail::split_fields(lines[header_line]);
    for (std::size_t i = 0; i < header.size(); ++i) {
        auto name = detail::lower(header[i]);
        for (std::size_t k = 0; k < required.size(); ++k)
            if (name == required[k]) index[k] = static_cast<int>(i);
    }
    for (std::size_t k = 0; k < required.size(); ++k)
        if (index[k] < 0)
            throw ParseError(header_line + 1, "missing required column '" + std::string(required[k]) + "'");

    struct Row {
        OhlcvBar bar;
        std::size_t line;
    };
    std::vector<Row> rows;
    for (std::size_t li = header_line + 1; li < lines.size(); ++li) {
        if (trim(lines[li]).empty()) continue;
        const std::size_t line_no = li + 1;
        auto fields = detail::split_fields(lines[li]);
        auto field = [&](std::size_t k) -> std::string_view {
            auto i = static_cast<std::size_t>(index[k]);
            if (i >= fields.size()) throw ParseError(line_no, "too few fields");
            return fields[i];
        };
        OhlcvBar bar;
        auto date = parse_date(field(0));
        if (!date) throw ParseError(line_no, "unparseable date '" + std::string(field(0)) + "'");
        bar.date = *date;
        double* targets[] = {&bar.open, &bar.high, &bar.low, &bar.close, &bar.adj_close};
        for (std::size_t k = 1; k <= 5; ++k) {
            auto v = parse_double(field(k));
            if (!v) throw ParseError(line_no, "unparseable number '" + std::string(field(k)) + "'");
            *targets[k - 1] = *v;
        }
        auto vol = parse_integer<std::int64_t>(field(6));
        if (!vol) {
            // Some sources print volume as "1234.0".
            auto v = parse_double(field(6));
            if (!v || *v != std::floor(*v) || std::abs(*v) > 9e15)
                throw ParseError(line_no, "unparseable volume '" + std::string(field(6)) + "'");
            vol = static_cast<std::int64_t>(*v);
        }
        bar.volume = *vol;
        if (auto why = detail::bar_violation(bar); !why.empty()) throw ParseError(line_no, why);
        rows.push_back({bar, line_no});
    }

    std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.bar.date < b.bar.date; });
    TimeSeriesTable table{std::move(symbol), {}};
    table.bars.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (i > 0 && rows[i].bar.date == rows[i - 1].bar.date)
            throw ParseError(std::max(rows[i].line, rows[i - 1].line),
                             "duplicate date " + format_date(rows[i].bar.date));
        table.bars.push_back(rows[i].bar);
    }
    return table;
}

/// Canonical CSV rendering; `parse_ohlcv_csv(to_csv(t)) == t`.
inline std::string to_csv(const TimeSeriesTable& table) {
    std::string out = "Date,Open,High,Low,Close,Adj Close,Volume\n";
    for (const auto& b : table.bars) {
        out += format_date(b.date);
        for (double p : {b.open, b.high, b.low, b.close, b.adj_close}) {
            out += ',';
            out += format_double(p);
        }
        out += ',';
        out += std::to_string(b.volume);
        out += '\n';
    }
    return out;
}

struct ColumnStats {
    std::size_t count = 0;
    double mean = 0.0;
    double std = 0.0;
    double min = 0.0;
    double q25 = 0.0;
    double q50 = 0.0;
    double q75 = 0.0;
    double max = 0.0;
    /// Set when std is undefined (a single observation) and reported as 0.
    bool degenerate = false;
};

struct SummaryStats {
    std::array<ColumnStats, 6> columns;

    const ColumnStats& operator[](Column c) const { return columns[static_cast<std::size_t>(c)]; }
};

/// Quantile with linear interpolation between order statistics at position
/// (n - 1) * p. `sorted` must be ascending and non-empty.
inline double quantile_sorted(std::span<const double> sorted, double p) {
    const double pos = (static_cast<double>(sorted.size()) - 1.0) * p;
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

inline ColumnStats describe(std::span<const double> values) {
    detail::require(!values.empty(), "cannot summarize an empty column");
    ColumnStats s;
    s.count = values.size();
    s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
    if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - s.mean) * (v - s.mean);
        s.std = std::sqrt(ss / static_cast<double>(values.size() - 1));
    } else {
        s.degenerate = true;
    }
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    s.min = sorted.front();
    s.max = sorted.back();
    s.q25 = quantile_sorted(sorted, 0.25);
    s.q50 = quantile_sorted(sorted, 0.50);
    s.q75 = quantile_sorted(sorted, 0.75);
    return s;
}

inline Series select_series(const TimeSeriesTable& table, Column column) {
    Series s;
    s.name = std::string(column_name(column));
    s.dates.reserve(table.size());
    s.values.reserve(table.size());
    for (const auto& bar : table.bars) {
        s.dates.push_back(bar.date);
        s.values.push_back(detail::column_value(bar, column));
    }
    return s;
}

inline Series select_series(const TimeSeriesTable& table, std::string_view column) {
    return select_series(table, parse_column(column));
}

inline SummaryStats summarize(const TimeSeriesTable& table) {
    detail::require(!table.empty(), "cannot summarize an empty table");
    SummaryStats out;
    for (Column c : kNumericColumns)
        out.columns[static_cast<std::size_t>(c)] = describe(select_series(table, c).values);
    return out;
}

}  // namespace horizonbench

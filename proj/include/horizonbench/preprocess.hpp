#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "horizonbench/errors.hpp"
#include "horizonbench/market_data.hpp"
#include "horizonbench/series.hpp"

namespace horizonbench {

// ---------------------------------------------------------------------------
// Differencing

/// Result of d-fold first differencing. `seeds[k]` is the first element of
/// the level-k series, i.e. the value dropped by pass k + 1; together with
/// `values` they reconstruct the original exactly.
struct DifferencedSeries {
    std::vector<double> values;
    int order = 0;
    std::vector<double> seeds;
};

inline DifferencedSeries difference(std::span<const double> series, int d) {
    detail::require(d >= 0, "differencing order must be non-negative");
    detail::require(series.size() > static_cast<std::size_t>(d),
                    "series of length " + std::to_string(series.size()) + " too short for d=" + std::to_string(d));
    DifferencedSeries out;
    out.order = d;
    out.values.assign(series.begin(), series.end());
    for (int pass = 0; pass < d; ++pass) {
        out.seeds.push_back(out.values.front());
        for (std::size_t i = 0; i + 1 < out.values.size(); ++i) out.values[i] = out.values[i + 1] - out.values[i];
        out.values.pop_back();
    }
    return out;
}

inline std::vector<double> integrate(const DifferencedSeries& diff) {
    detail::require(diff.order >= 0 && diff.seeds.size() == static_cast<std::size_t>(diff.order),
                    "differenced series of order " + std::to_string(diff.order) + " carries " +
                        std::to_string(diff.seeds.size()) + " seeds");
    std::vector<double> level = diff.values;
    for (int k = diff.order - 1; k >= 0; --k) {
        std::vector<double> up;
        up.reserve(level.size() + 1);
        up.push_back(diff.seeds[static_cast<std::size_t>(k)]);
        for (double v : level) up.push_back(up.back() + v);
        level = std::move(up);
    }
    return level;
}

// ---------------------------------------------------------------------------
// Scaling

/// Affine map [lo, hi] -> [0, 1] fitted on training data only. Values
/// outside the training range map outside [0, 1].
struct MinMaxScaler {
    double lo = 0.0;
    double hi = 1.0;

    double transform(double x) const { return (x - lo) / (hi - lo); }
    double inverse(double y) const { return lo + y * (hi - lo); }

    std::vector<double> transform(std::span<const double> xs) const {
        std::vector<double> out(xs.size());
        std::transform(xs.begin(), xs.end(), out.begin(), [this](double x) { return transform(x); });
        return out;
    }
    std::vector<double> inverse(std::span<const double> ys) const {
        std::vector<double> out(ys.size());
        std::transform(ys.begin(), ys.end(), out.begin(), [this](double y) { return inverse(y); });
        return out;
    }
};

inline MinMaxScaler fit_minmax(std::span<const double> train) {
    detail::require(!train.empty(), "cannot fit a scaler on an empty series");
    auto [mn, mx] = std::minmax_element(train.begin(), train.end());
    detail::require(*mx > *mn, "cannot fit a scaler on a constant series");
    return MinMaxScaler{*mn, *mx};
}

// ---------------------------------------------------------------------------
// Supervised windows

/// Row-major (num_samples x window) inputs with one-step-ahead targets:
/// input row i is series[i, i + w), target i is series[i + w].
struct WindowedDataset {
    std::vector<double> inputs;
    std::vector<double> targets;
    std::size_t window = 0;

    std::size_t size() const noexcept { return targets.size(); }
    std::span<const double> input(std::size_t i) const { return {inputs.data() + i * window, window}; }

    /// Samples [first, first + count).
    WindowedDataset slice(std::size_t first, std::size_t count) const {
        detail::require(first + count <= size(), "dataset slice out of range");
        WindowedDataset out;
        out.window = window;
        out.inputs.assign(inputs.begin() + static_cast<std::ptrdiff_t>(first * window),
                          inputs.begin() + static_cast<std::ptrdiff_t>((first + count) * window));
        out.targets.assign(targets.begin() + static_cast<std::ptrdiff_t>(first),
                           targets.begin() + static_cast<std::ptrdiff_t>(first + count));
        return out;
    }
};

inline WindowedDataset make_windows(std::span<const double> series, std::size_t window) {
    detail::require(window >= 1, "window length must be at least 1");
    detail::require(series.size() > window, "series of length " + std::to_string(series.size()) +
                                                " too short for window " + std::to_string(window));
    WindowedDataset ds;
    ds.window = window;
    const std::size_t n = series.size() - window;
    ds.inputs.reserve(n * window);
    ds.targets.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        ds.inputs.insert(ds.inputs.end(), series.begin() + static_cast<std::ptrdiff_t>(i),
                         series.begin() + static_cast<std::ptrdiff_t>(i + window));
        ds.targets.push_back(series[i + window]);
    }
    return ds;
}

// ---------------------------------------------------------------------------
// Horizons

enum class Horizon { Short, Medium, Long };

inline constexpr std::size_t kTradingDaysPerYear = 252;

/// 1 year, 2.5 years and 5 years of trading rows.
inline constexpr std::size_t horizon_rows(Horizon h) {
    switch (h) {
        case Horizon::Short: return kTradingDaysPerYear;
        case Horizon::Medium: return kTradingDaysPerYear * 5 / 2;
        case Horizon::Long: return kTradingDaysPerYear * 5;
    }
    return 0;
}

inline constexpr std::string_view horizon_name(Horizon h) {
    switch (h) {
        case Horizon::Short: return "short";
        case Horizon::Medium: return "medium";
        case Horizon::Long: return "long";
    }
    return "?";
}

inline Horizon parse_horizon(std::string_view name) {
    auto key = detail::lower(trim(name));
    for (Horizon h : {Horizon::Short, Horizon::Medium, Horizon::Long})
        if (key == horizon_name(h)) return h;
    throw InputError("unknown horizon '" + std::string(name) + "'");
}

struct SplitSizes {
    std::size_t slice = 0;
    std::size_t train = 0;
    std::size_t test = 0;
};

/// The slice is the most recent min(rows, horizon_rows) rows; the training
/// part is floor(train_fraction * slice).
inline SplitSizes split_sizes(std::size_t rows, Horizon horizon, double train_fraction) {
    detail::require(train_fraction > 0.0 && train_fraction < 1.0, "train_fraction must lie in (0, 1)");
    SplitSizes s;
    s.slice = std::min(rows, horizon_rows(horizon));
    const double min_rows = 2.0 / (1.0 - train_fraction);
    if (static_cast<double>(s.slice) + 1e-9 < min_rows)
        throw InputError("horizon slice of " + std::to_string(s.slice) + " rows is too short: need at least " +
                         format_double(std::ceil(min_rows - 1e-9)) + " rows for a 2-point test set");
    s.train = static_cast<std::size_t>(std::floor(train_fraction * static_cast<double>(s.slice) + 1e-9));
    s.test = s.slice - s.train;
    return s;
}

struct HorizonSplit {
    Horizon horizon = Horizon::Short;
    Series train;
    Series test;
};

inline HorizonSplit horizon_split(const Series& series, Horizon horizon, double train_fraction = 0.8) {
    const auto sizes = split_sizes(series.size(), horizon, train_fraction);
    const std::size_t first = series.size() - sizes.slice;
    return HorizonSplit{horizon, series.slice(first, sizes.train), series.slice(first + sizes.train, sizes.test)};
}

inline HorizonSplit horizon_split(const TimeSeriesTable& table, Horizon horizon, double train_fraction = 0.8,
                                  Column column = Column::Close) {
    return horizon_split(select_series(table, column), horizon, train_fraction);
}

}  // namespace horizonbench

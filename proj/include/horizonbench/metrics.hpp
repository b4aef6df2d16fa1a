#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>

#include "horizonbench/errors.hpp"

namespace horizonbench {

/// The five regression metrics over one (predicted, actual) pair, in the
/// units of the inputs. `mape_percent` is empty when an actual is zero.
struct MetricReport {
    double mse = 0.0;
    double rmse = 0.0;
    double mae = 0.0;
    std::optional<double> mape_percent;
    double r2 = 0.0;
    std::size_t n = 0;
};

namespace detail {

inline void check_pair(std::span<const double> pred, std::span<const double> actual, const char* metric) {
    if (pred.size() != actual.size())
        throw InputError(std::string(metric) + ": length mismatch (" + std::to_string(pred.size()) + " vs " +
                         std::to_string(actual.size()) + ")");
    if (pred.empty()) throw InputError(std::string(metric) + ": empty input");
}

}  // namespace detail

inline double mse(std::span<const double> pred, std::span<const double> actual) {
    detail::check_pair(pred, actual, "mse");
    double s = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) s += (pred[i] - actual[i]) * (pred[i] - actual[i]);
    return s / static_cast<double>(pred.size());
}

inline double rmse(std::span<const double> pred, std::span<const double> actual) {
    detail::check_pair(pred, actual, "rmse");
    return std::sqrt(mse(pred, actual));
}

inline double mae(std::span<const double> pred, std::span<const double> actual) {
    detail::check_pair(pred, actual, "mae");
    double s = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) s += std::abs(pred[i] - actual[i]);
    return s / static_cast<double>(pred.size());
}

/// Mean absolute percentage error in percent. A zero actual makes the metric
/// undefined and raises rather than dropping the row.
inline double mape(std::span<const double> pred, std::span<const double> actual) {
    detail::check_pair(pred, actual, "mape");
    double s = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        if (actual[i] == 0.0) throw InputError("mape: undefined, actual value at index " + std::to_string(i) + " is zero");
        s += std::abs((pred[i] - actual[i]) / actual[i]);
    }
    return 100.0 * s / static_cast<double>(pred.size());
}

/// 1 - SS_res / SS_tot. Unbounded below.
inline double r2(std::span<const double> pred, std::span<const double> actual) {
    detail::check_pair(pred, actual, "r2");
    if (actual.size() < 2) throw InputError("r2: need at least 2 observations");
    double mean = 0.0;
    for (double a : actual) mean += a;
    mean /= static_cast<double>(actual.size());
    double ss_res = 0.0;
    double ss_tot = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        ss_res += (actual[i] - pred[i]) * (actual[i] - pred[i]);
        ss_tot += (actual[i] - mean) * (actual[i] - mean);
    }
    if (ss_tot == 0.0) throw InputError("r2: undefined for constant actual values");
    return 1.0 - ss_res / ss_tot;
}

inline MetricReport evaluate(std::span<const double> pred, std::span<const double> actual) {
    detail::check_pair(pred, actual, "evaluate");
    MetricReport r;
    r.n = pred.size();
    r.mse = mse(pred, actual);
    r.rmse = std::sqrt(r.mse);
    r.mae = mae(pred, actual);
    bool zero_actual = false;
    for (double a : actual) zero_actual = zero_actual || a == 0.0;
    if (!zero_actual) r.mape_percent = mape(pred, actual);
    r.r2 = r2(pred, actual);
    return r;
}

}  // namespace horizonbench

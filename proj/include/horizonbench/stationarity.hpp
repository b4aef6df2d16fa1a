#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "horizonbench/errors.hpp"

namespace horizonbench {

// ---------------------------------------------------------------------------
// Ordinary least squares

struct OlsFit {
    Eigen::VectorXd coefficients;
    Eigen::VectorXd std_errors;
    Eigen::VectorXd residuals;
    Eigen::Index dof = 0;
    double rss = 0.0;
};

/// Least squares through a column-pivoted Householder QR. Standard errors
/// are sqrt(diag(s^2 (X'X)^-1)) with s^2 = RSS / (n - k).
inline OlsFit ols_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
    const Eigen::Index n = X.rows();
    const Eigen::Index k = X.cols();
    if (y.size() != n)
        throw InputError("ols_fit: X has " + std::to_string(n) + " rows but y has " + std::to_string(y.size()));
    if (n <= k) throw InputError("ols_fit: need more rows than columns");
    if (!X.allFinite() || !y.allFinite()) throw NumericalError("ols_fit: non-finite input");

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
    qr.setThreshold(1e-10);
    if (qr.rank() < k)
        throw NumericalError("ols_fit: regressor matrix is rank deficient (rank " + std::to_string(qr.rank()) +
                             " < " + std::to_string(k) + ")");

    OlsFit fit;
    fit.coefficients = qr.solve(y);
    fit.residuals = y - X * fit.coefficients;
    fit.rss = fit.residuals.squaredNorm();
    fit.dof = n - k;

    const Eigen::MatrixXd r = qr.matrixR().topLeftCorner(k, k).template triangularView<Eigen::Upper>();
    const Eigen::MatrixXd r_inv =
        r.template triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(k, k));
    const Eigen::MatrixXd xtx_inv_perm = r_inv * r_inv.transpose();
    const auto& perm = qr.colsPermutation();
    const Eigen::MatrixXd xtx_inv = perm * xtx_inv_perm * perm.transpose();
    const double s2 = fit.rss / static_cast<double>(fit.dof);
    fit.std_errors = (s2 * xtx_inv.diagonal().array()).sqrt().matrix();
    return fit;
}

// ---------------------------------------------------------------------------
// Augmented Dickey-Fuller

struct AdfResult {
    double statistic = 0.0;
    double p_value = 1.0;
    double crit_1pct = -3.43;
    double crit_5pct = -2.86;
    double crit_10pct = -2.57;
    int lags_used = 0;
    std::size_t observations = 0;
    bool reject_at_5pct = false;
};

namespace adf {

/// Large-sample quantiles of the Dickey-Fuller t-distribution for the
/// constant-only regression.
inline constexpr double kCrit1 = -3.43;
inline constexpr double kCrit5 = -2.86;
inline constexpr double kCrit10 = -2.57;

inline constexpr std::array<std::pair<double, double>, 8> kQuantiles{{
    {-3.43, 0.01},
    {-3.12, 0.025},
    {-2.86, 0.05},
    {-2.57, 0.10},
    {-0.44, 0.90},
    {-0.07, 0.95},
    {0.23, 0.975},
    {0.60, 0.99},
}};

inline constexpr std::size_t kMinObservations = 20;

/// Schwert's rule floor(12 (n / 100)^(1/4)).
inline int schwert_lags(std::size_t n) {
    return static_cast<int>(std::floor(12.0 * std::pow(static_cast<double>(n) / 100.0, 0.25)));
}

/// Piecewise-linear in the statistic through the quantile table, linear
/// extrapolation past the ends, clamped to [0.001, 0.999]. Coarse, but
/// monotone non-decreasing in the statistic.
inline double p_value(double statistic) {
    const auto& q = kQuantiles;
    std::size_t seg = 0;
    if (statistic <= q.front().first) {
        seg = 0;
    } else if (statistic >= q.back().first) {
        seg = q.size() - 2;
    } else {
        while (seg + 1 < q.size() && statistic > q[seg + 1].first) ++seg;
    }
    const auto [x0, p0] = q[seg];
    const auto [x1, p1] = q[seg + 1];
    const double p = p0 + (statistic - x0) * (p1 - p0) / (x1 - x0);
    return std::clamp(p, 0.001, 0.999);
}

}  // namespace adf

/// ADF test on the regression
///   dy_t = a + g y_{t-1} + sum_{i=1..L} d_i dy_{t-i} + e_t
/// with no deterministic trend. The statistic is the t-ratio of g.
///
/// When `max_lag` is absent L follows Schwert's rule, capped at (n - 1) / 3
/// so short series keep a usable number of residual degrees of freedom.
inline AdfResult adf_test(std::span<const double> y, std::optional<int> max_lag = std::nullopt) {
    const std::size_t n = y.size();
    if (n < adf::kMinObservations)
        throw InputError("adf_test: need at least " + std::to_string(adf::kMinObservations) + " observations, got " +
                         std::to_string(n));
    for (double v : y)
        if (!std::isfinite(v)) throw InputError("adf_test: non-finite observation");
    if (std::all_of(y.begin(), y.end(), [&](double v) { return v == y.front(); }))
        throw InputError("adf_test: series is constant");

    int lags = 0;
    if (max_lag) {
        if (*max_lag < 0) throw InputError("adf_test: max_lag must be non-negative");
        lags = *max_lag;
    } else {
        lags = std::min(adf::schwert_lags(n), static_cast<int>((n - 1) / 3));
    }
    const auto L = static_cast<std::size_t>(lags);
    if (n < L + 1 || n - 1 - L <= L + 2)
        throw InputError("adf_test: " + std::to_string(lags) + " lags leave no degrees of freedom for " +
                         std::to_string(n) + " observations");

    std::vector<double> dy(n - 1);
    for (std::size_t t = 0; t + 1 < n; ++t) dy[t] = y[t + 1] - y[t];

    const auto rows = static_cast<Eigen::Index>(n - 1 - L);
    const auto cols = static_cast<Eigen::Index>(L + 2);
    Eigen::MatrixXd X(rows, cols);
    Eigen::VectorXd target(rows);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const std::size_t t = L + static_cast<std::size_t>(r);  // index into dy
        target(r) = dy[t];
        X(r, 0) = 1.0;
        X(r, 1) = y[t];
        for (std::size_t i = 1; i <= L; ++i) X(r, static_cast<Eigen::Index>(i + 1)) = dy[t - i];
    }

    OlsFit fit;
    try {
        fit = ols_fit(X, target);
    } catch (const NumericalError& e) {
        throw InputError(std::string("adf_test: degenerate series (") + e.what() + ")");
    }
    if (!(fit.std_errors(1) > 0.0)) throw InputError("adf_test: degenerate series (zero standard error)");

    AdfResult r;
    r.statistic = fit.coefficients(1) / fit.std_errors(1);
    r.p_value = adf::p_value(r.statistic);
    r.lags_used = lags;
    r.observations = static_cast<std::size_t>(rows);
    r.reject_at_5pct = r.statistic < r.crit_5pct;
    return r;
}

// ---------------------------------------------------------------------------
// Moving-average decomposition

/// Centered moving-average trend with residual = original - trend. Edge
/// indices closer than (window - 1) / 2 to either end have no trend.
struct Decomposition {
    std::vector<double> original;
    std::vector<std::optional<double>> trend;
    std::vector<std::optional<double>> residual;
    std::size_t window = 0;
};

inline Decomposition decompose(std::span<const double> series, std::size_t window) {
    if (window % 2 == 0) throw InputError("decompose: window must be odd, got " + std::to_string(window));
    if (window < 3 || window > series.size())
        throw InputError("decompose: window " + std::to_string(window) + " outside [3, " +
                         std::to_string(series.size()) + "]");
    Decomposition d;
    d.window = window;
    d.original.assign(series.begin(), series.end());
    d.trend.assign(series.size(), std::nullopt);
    d.residual.assign(series.size(), std::nullopt);
    const std::size_t half = window / 2;
    for (std::size_t t = half; t + half < series.size(); ++t) {
        double sum = 0.0;
        for (std::size_t j = t - half; j <= t + half; ++j) sum += series[j];
        const double trend = sum / static_cast<double>(window);
        d.trend[t] = trend;
        d.residual[t] = series[t] - trend;
    }
    return d;
}

}  // namespace horizonbench

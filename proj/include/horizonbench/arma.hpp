#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "horizonbench/errors.hpp"
#include "horizonbench/nelder_mead.hpp"
#include "horizonbench/preprocess.hpp"
#include "horizonbench/stationarity.hpp"

namespace horizonbench {

/// y_t = c + sum_i ar[i] y_{t-1-i} + sum_j ma[j] e_{t-1-j} + e_t
///
/// The MA part uses the plus sign convention throughout.
struct ArmaParams {
    std::vector<double> ar;
    std::vector<double> ma;
    double intercept = 0.0;

    int p() const noexcept { return static_cast<int>(ar.size()); }
    int q() const noexcept { return static_cast<int>(ma.size()); }
    std::size_t max_lag() const noexcept { return std::max(ar.size(), ma.size()); }

    bool operator==(const ArmaParams&) const = default;
};

inline constexpr double kCoefficientBound = 0.99;

struct ResidualTrace {
    /// e_t for t = max(p, q) .. n - 1.
    std::vector<double> residuals;
    double css = 0.0;
};

struct ArimaModel {
    ArmaParams params;
    int d = 0;
    std::vector<double> seeds;
    std::size_t fitted_on = 0;
    double css = 0.0;
    double aic = 0.0;
    /// Residuals of the fit on the differenced scale (see ResidualTrace).
    std::vector<double> residuals;
    bool converged = true;
    int iterations = 0;
    /// Best objective value after each simplex iteration.
    std::vector<double> objective_trace;

    int p() const noexcept { return params.p(); }
    int q() const noexcept { return params.q(); }
};

namespace detail {

/// One-step conditional prediction of z[t] from z[< t] and e[< t].
inline double arma_predict(const ArmaParams& params, std::span<const double> z, std::span<const double> eps,
                           std::size_t t) {
    double pred = params.intercept;
    for (std::size_t i = 0; i < params.ar.size(); ++i) pred += params.ar[i] * z[t - 1 - i];
    for (std::size_t j = 0; j < params.ma.size(); ++j) pred += params.ma[j] * eps[t - 1 - j];
    return pred;
}

/// Full-length residual vector with pre-sample entries (t < max(p, q)) at 0.
inline std::vector<double> conditional_residuals(const ArmaParams& params, std::span<const double> z) {
    const std::size_t m = params.max_lag();
    std::vector<double> eps(z.size(), 0.0);
    for (std::size_t t = m; t < z.size(); ++t) eps[t] = z[t] - arma_predict(params, z, eps, t);
    return eps;
}

inline double sample_aic(double css, std::size_t n, int num_params) {
    const double nn = static_cast<double>(n);
    const double ratio = std::max(css / nn, std::numeric_limits<double>::min());
    return nn * std::log(ratio) + 2.0 * num_params;
}

inline bool is_constant(std::span<const double> s) {
    return std::all_of(s.begin(), s.end(), [&](double v) { return v == s.front(); });
}

}  // namespace detail

/// Conditional residuals e_t = y_t - c - sum phi_i y_{t-i} - sum theta_j e_{t-j}
/// with pre-sample errors fixed at zero; reported for t > max(p, q).
inline ResidualTrace css_residuals(const ArmaParams& params, std::span<const double> series) {
    const std::size_t m = params.max_lag();
    if (series.size() <= m)
        throw InputError("css_residuals: series of length " + std::to_string(series.size()) +
                         " too short for max(p, q) = " + std::to_string(m));
    auto eps = detail::conditional_residuals(params, series);
    ResidualTrace trace;
    trace.residuals.assign(eps.begin() + static_cast<std::ptrdiff_t>(m), eps.end());
    for (double e : trace.residuals) trace.css += e * e;
    return trace;
}

struct ArmaFitOptions {
    NelderMeadOptions simplex{};
};

/// Conditional-sum-of-squares fit of ARMA(p, q) by Nelder-Mead from
/// phi = theta = 0, c = mean(series). Coefficients are clamped to the
/// +/-0.99 box inside the objective with a quadratic penalty for the excess,
/// which keeps the objective continuous across the boundary.
inline ArimaModel fit_arma(std::span<const double> series, int p, int q, const ArmaFitOptions& options = {}) {
    if (p < 0 || q < 0) throw InputError("fit_arma: orders must be non-negative");
    const std::size_t need = 10 * static_cast<std::size_t>(p + q + 1);
    if (series.size() < need)
        throw InputError("fit_arma: ARMA(" + std::to_string(p) + "," + std::to_string(q) + ") needs at least " +
                         std::to_string(need) + " observations, got " + std::to_string(series.size()));
    if (detail::is_constant(series)) throw InputError("fit_arma: series is constant");

    const auto np = static_cast<std::size_t>(p);
    const auto nq = static_cast<std::size_t>(q);
    auto unpack = [&](const Eigen::VectorXd& x, double& excess) {
        ArmaParams params;
        params.intercept = x(0);
        excess = 0.0;
        auto clamp = [&](double v) {
            const double c = std::clamp(v, -kCoefficientBound, kCoefficientBound);
            excess += (v - c) * (v - c);
            return c;
        };
        for (std::size_t i = 0; i < np; ++i) params.ar.push_back(clamp(x(static_cast<Eigen::Index>(1 + i))));
        for (std::size_t j = 0; j < nq; ++j) params.ma.push_back(clamp(x(static_cast<Eigen::Index>(1 + np + j))));
        return params;
    };

    const double mean = std::accumulate(series.begin(), series.end(), 0.0) / static_cast<double>(series.size());
    Eigen::VectorXd x0 = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(1 + np + nq));
    x0(0) = mean;

    double start_css = 0.0;
    for (double v : series) start_css += (v - mean) * (v - mean);
    const double penalty_weight = 1e4 * std::max(1.0, start_css);

    auto objective = [&](const Eigen::VectorXd& x) {
        double excess = 0.0;
        const auto params = unpack(x, excess);
        const auto eps = detail::conditional_residuals(params, series);
        double css = 0.0;
        for (std::size_t t = params.max_lag(); t < eps.size(); ++t) css += eps[t] * eps[t];
        if (!std::isfinite(css)) return std::numeric_limits<double>::max();
        return css + penalty_weight * excess;
    };

    const auto nm = nelder_mead(objective, x0, options.simplex);

    ArimaModel model;
    double excess = 0.0;
    model.params = unpack(nm.x, excess);
    const auto trace = css_residuals(model.params, series);
    model.residuals = trace.residuals;
    model.css = trace.css;
    model.aic = detail::sample_aic(trace.css, trace.residuals.size(), p + q + 1);
    model.fitted_on = series.size();
    model.converged = nm.converged;
    model.iterations = nm.iterations;
    model.objective_trace = nm.best_trace;
    return model;
}

/// Differences `d` times, then fits ARMA(p, q) on the result.
inline ArimaModel fit_arima(std::span<const double> series, int p, int d, int q, const ArmaFitOptions& options = {}) {
    auto diff = difference(series, d);
    auto model = fit_arma(diff.values, p, q, options);
    model.d = d;
    model.seeds = std::move(diff.seeds);
    model.fitted_on = series.size();
    return model;
}

// ---------------------------------------------------------------------------
// Order selection

struct OrderCandidate {
    int p = 0;
    int q = 0;
    /// AIC over the common residual sample shared by every candidate.
    double aic = 0.0;
};

struct OrderSelection {
    int p = 0;
    int d = 0;
    int q = 0;
    double aic = 0.0;
    /// No d in the grid passed the ADF gate; the largest d was used.
    bool stationarity_fallback = false;
    std::vector<OrderCandidate> candidates;
    /// One per d tried; NaN where the ADF regression was degenerate.
    std::vector<double> adf_statistics;
};

struct OrderSearch {
    int p_max = 3;
    int q_max = 3;
    std::vector<int> d_choices{0, 1};
    ArmaFitOptions fit{};
};

/// Chooses d as the smallest candidate whose differenced series rejects the
/// ADF unit root at 5% (a single candidate is taken as given), then searches
/// the (p, q) grid exhaustively for the lowest AIC. AICs are compared over
/// the residuals from the largest feasible max(p, q) onwards so that every
/// candidate is scored on the same observations. Ties go to the smaller
/// p + q, then the smaller p.
inline OrderSelection select_order(std::span<const double> series, const OrderSearch& search = {}) {
    if (search.d_choices.empty()) throw InputError("select_order: d_choices must not be empty");
    if (search.p_max < 0 || search.q_max < 0) throw InputError("select_order: p_max and q_max must be non-negative");
    auto ds = search.d_choices;
    std::sort(ds.begin(), ds.end());
    ds.erase(std::unique(ds.begin(), ds.end()), ds.end());

    OrderSelection sel;
    if (ds.size() == 1) {
        sel.d = ds.front();
    } else {
        bool found = false;
        for (int d : ds) {
            const auto diff = difference(series, d);
            AdfResult adf;
            try {
                adf = adf_test(diff.values);
            } catch (const InputError&) {
                // A noise-free recurrence (e.g. a pure sinusoid) makes the
                // regression exact; the gate cannot be evaluated at this d.
                if (diff.values.size() < adf::kMinObservations) throw;
                sel.adf_statistics.push_back(std::numeric_limits<double>::quiet_NaN());
                continue;
            }
            sel.adf_statistics.push_back(adf.statistic);
            if (adf.reject_at_5pct) {
                sel.d = d;
                found = true;
                break;
            }
        }
        if (!found) {
            sel.d = ds.back();
            sel.stationarity_fallback = true;
        }
    }

    const auto z = difference(series, sel.d).values;
    struct Fitted {
        int p, q;
        ArmaParams params;
    };
    std::vector<Fitted> fitted;
    std::size_t common_start = 0;
    for (int p = 0; p <= search.p_max; ++p) {
        for (int q = 0; q <= search.q_max; ++q) {
            if (z.size() < 10 * static_cast<std::size_t>(p + q + 1)) continue;
            auto model = fit_arma(z, p, q, search.fit);
            common_start = std::max(common_start, model.params.max_lag());
            fitted.push_back({p, q, std::move(model.params)});
        }
    }
    if (fitted.empty())
        throw InputError("select_order: series of length " + std::to_string(z.size()) + " too short for any order");

    bool first = true;
    const std::size_t n_common = z.size() - common_start;
    for (const auto& f : fitted) {
        const auto eps = detail::conditional_residuals(f.params, z);
        double css = 0.0;
        for (std::size_t t = common_start; t < eps.size(); ++t) css += eps[t] * eps[t];
        const double aic = detail::sample_aic(css, n_common, f.p + f.q + 1);
        sel.candidates.push_back({f.p, f.q, aic});
        const double tol = 1e-9 * std::max(1.0, std::abs(aic));
        bool better = first || aic < sel.aic - tol;
        if (!better && std::abs(aic - sel.aic) <= tol) {
            better = (f.p + f.q < sel.p + sel.q) || (f.p + f.q == sel.p + sel.q && f.p < sel.p);
        }
        if (better) {
            sel.p = f.p;
            sel.q = f.q;
            sel.aic = aic;
            first = false;
        }
    }
    return sel;
}

// ---------------------------------------------------------------------------
// Forecasting

namespace detail {

inline void require_history(const ArimaModel& model, std::size_t n) {
    const std::size_t need = static_cast<std::size_t>(model.d) + model.params.max_lag();
    if (n <= static_cast<std::size_t>(model.d) || n < need || n == 0)
        throw InputError("forecast: history of length " + std::to_string(n) + " too short for ARIMA(" +
                         std::to_string(model.p()) + "," + std::to_string(model.d) + "," +
                         std::to_string(model.q()) + ")");
}

inline double binomial(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

}  // namespace detail

/// Recursive h-step forecast in the units of `history`. Future errors are
/// zero; lagged errors come from the conditional residuals of `history`.
inline std::vector<double> forecast(const ArimaModel& model, std::span<const double> history, std::size_t steps) {
    if (steps < 1) throw InputError("forecast: steps must be at least 1");
    detail::require_history(model, history.size());

    // Last value of each differencing level 0 .. d-1.
    std::vector<double> last(static_cast<std::size_t>(model.d));
    std::vector<double> level(history.begin(), history.end());
    for (int k = 0; k < model.d; ++k) {
        last[static_cast<std::size_t>(k)] = level.back();
        for (std::size_t i = 0; i + 1 < level.size(); ++i) level[i] = level[i + 1] - level[i];
        level.pop_back();
    }
    std::vector<double> z = std::move(level);
    std::vector<double> eps = detail::conditional_residuals(model.params, z);

    std::vector<double> out;
    out.reserve(steps);
    for (std::size_t s = 0; s < steps; ++s) {
        const double zhat = detail::arma_predict(model.params, z, eps, z.size());
        z.push_back(zhat);
        eps.push_back(0.0);
        double cur = zhat;
        for (int k = model.d - 1; k >= 0; --k) {
            auto& l = last[static_cast<std::size_t>(k)];
            l += cur;
            cur = l;
        }
        out.push_back(cur);
    }
    return out;
}

/// One-step-ahead predictions over `test` with frozen parameters. The
/// prediction for test[i] uses every observation before it; after each step
/// the realised error joins the residual history.
inline std::vector<double> rolling_one_step(const ArimaModel& model, std::span<const double> train,
                                            std::span<const double> test) {
    detail::require_history(model, train.size());
    std::vector<double> full(train.begin(), train.end());
    full.insert(full.end(), test.begin(), test.end());
    const auto d = static_cast<std::size_t>(model.d);
    const auto m = model.params.max_lag();

    std::vector<double> z;  // z[t] pairs with full[t + d]
    std::vector<double> eps;
    z.reserve(full.size());
    eps.reserve(full.size());
    auto level_d = [&](std::size_t T) {
        double v = 0.0;
        for (std::size_t k = 0; k <= d; ++k)
            v += ((k % 2 == 0) ? 1.0 : -1.0) * detail::binomial(model.d, static_cast<int>(k)) * full[T - k];
        return v;
    };

    std::vector<double> predictions;
    predictions.reserve(test.size());
    for (std::size_t T = d; T < full.size(); ++T) {
        const std::size_t t = T - d;
        const double zhat = t >= m ? detail::arma_predict(model.params, z, eps, t) : 0.0;
        if (T >= train.size()) {
            double yhat = zhat;
            for (std::size_t k = 1; k <= d; ++k)
                yhat += ((k % 2 == 1) ? 1.0 : -1.0) * detail::binomial(model.d, static_cast<int>(k)) * full[T - k];
            predictions.push_back(yhat);
        }
        const double zt = level_d(T);
        z.push_back(zt);
        eps.push_back(t >= m ? zt - zhat : 0.0);
    }
    return predictions;
}

}  // namespace horizonbench

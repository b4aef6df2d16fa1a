#pragma once

// Slow, independent reference implementations and data generators used as
// test oracles. Nothing here shares code with the library under test beyond
// the parameter containers.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

#include "horizonbench/market_data.hpp"
#include "horizonbench/recurrent.hpp"

namespace oracle {

using Vec = std::vector<double>;
using Mat = std::vector<Vec>;  // row-major

// Least squares via the normal equations and Gauss-Jordan elimination with
// partial pivoting. Fine for the small, well-conditioned designs in tests.
inline Vec least_squares(const Mat& X, const Vec& y) {
    const std::size_t k = X.front().size();
    Mat a(k, Vec(k + 1, 0.0));
    for (std::size_t r = 0; r < X.size(); ++r)
        for (std::size_t i = 0; i < k; ++i) {
            for (std::size_t j = 0; j < k; ++j) a[i][j] += X[r][i] * X[r][j];
            a[i][k] += X[r][i] * y[r];
        }
    for (std::size_t c = 0; c < k; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < k; ++r)
            if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
        std::swap(a[c], a[piv]);
        if (std::abs(a[c][c]) < 1e-300) throw std::runtime_error("singular normal equations");
        for (std::size_t r = 0; r < k; ++r) {
            if (r == c) continue;
            const double m = a[r][c] / a[c][c];
            for (std::size_t j = c; j <= k; ++j) a[r][j] -= m * a[c][j];
        }
    }
    Vec beta(k);
    for (std::size_t i = 0; i < k; ++i) beta[i] = a[i][k] / a[i][i];
    return beta;
}

/// Dickey-Fuller t statistic with a constant and `lags` lagged differences,
/// computed from scratch: normal equations and the textbook variance formula.
inline double adf_statistic(const Vec& y, int lags) {
    Vec dy(y.size() - 1);
    for (std::size_t t = 1; t < y.size(); ++t) dy[t - 1] = y[t] - y[t - 1];
    Mat X;
    Vec target;
    for (std::size_t t = static_cast<std::size_t>(lags); t < dy.size(); ++t) {
        Vec row{1.0, y[t]};
        for (int j = 1; j <= lags; ++j) row.push_back(dy[t - j]);
        X.push_back(row);
        target.push_back(dy[t]);
    }
    const auto beta = least_squares(X, target);
    const std::size_t n = X.size(), k = beta.size();
    double rss = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
        double fit = 0.0;
        for (std::size_t j = 0; j < k; ++j) fit += X[r][j] * beta[j];
        rss += (target[r] - fit) * (target[r] - fit);
    }
    const double s2 = rss / static_cast<double>(n - k);
    // (X'X)^-1 entry for the y_{t-1} coefficient via solving X'X e = unit.
    Mat xtx(k, Vec(k, 0.0));
    for (const auto& row : X)
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = 0; j < k; ++j) xtx[i][j] += row[i] * row[j];
    Mat aug(k, Vec(2 * k, 0.0));
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) aug[i][j] = xtx[i][j];
        aug[i][k + i] = 1.0;
    }
    for (std::size_t c = 0; c < k; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < k; ++r)
            if (std::abs(aug[r][c]) > std::abs(aug[piv][c])) piv = r;
        std::swap(aug[c], aug[piv]);
        for (std::size_t r = 0; r < k; ++r) {
            if (r == c) continue;
            const double m = aug[r][c] / aug[c][c];
            for (std::size_t j = c; j < 2 * k; ++j) aug[r][j] -= m * aug[c][j];
        }
    }
    const double inv11 = aug[1][k + 1] / aug[1][1];
    return beta[1] / std::sqrt(s2 * inv11);
}

// ---------------------------------------------------------------------------
// Recurrent cells, one scalar at a time.

inline double sig(double x) { return 1.0 / (1.0 + std::exp(-x)); }

inline double at(const Eigen::MatrixXd& m, Eigen::Index r, Eigen::Index c) { return m(r, c); }

/// Prediction of a single-input LSTM network for one window, by loops.
inline double lstm_predict(const horizonbench::LstmNetwork& net, const Vec& window) {
    const auto& p = net.weights.cell;
    const auto H = p.hidden_size();
    Vec h(H, 0.0), c(H, 0.0);
    for (double x : window) {
        Vec hn(H), cn(H);
        for (Eigen::Index k = 0; k < H; ++k) {
            double ai = p.w_xi(k, 0) * x + p.b_i(k), af = p.w_xf(k, 0) * x + p.b_f(k);
            double ag = p.w_xg(k, 0) * x + p.b_g(k), ao = p.w_xo(k, 0) * x + p.b_o(k);
            for (Eigen::Index j = 0; j < H; ++j) {
                ai += at(p.w_hi, k, j) * h[j];
                af += at(p.w_hf, k, j) * h[j];
                ag += at(p.w_hg, k, j) * h[j];
                ao += at(p.w_ho, k, j) * h[j];
            }
            cn[k] = sig(af) * c[k] + sig(ai) * std::tanh(ag);
            hn[k] = sig(ao) * std::tanh(cn[k]);
        }
        h = hn;
        c = cn;
    }
    double y = net.weights.head_b(0);
    for (Eigen::Index k = 0; k < H; ++k) y += net.weights.head_w(k) * h[k];
    return y;
}

inline double gru_predict(const horizonbench::GruNetwork& net, const Vec& window) {
    const auto& p = net.weights.cell;
    const auto H = p.hidden_size();
    Vec h(H, 0.0);
    for (double x : window) {
        Vec hn(H);
        for (Eigen::Index k = 0; k < H; ++k) {
            double az = p.w_xz(k, 0) * x + p.b_z(k), ar = p.w_xr(k, 0) * x + p.b_r(k);
            double uh = 0.0;
            for (Eigen::Index j = 0; j < H; ++j) {
                az += at(p.w_hz, k, j) * h[j];
                ar += at(p.w_hr, k, j) * h[j];
                uh += at(p.w_hh, k, j) * h[j];
            }
            const double z = sig(az), r = sig(ar);
            const double n = std::tanh(p.w_xh(k, 0) * x + r * uh + p.b_h(k));
            hn[k] = (1.0 - z) * h[k] + z * n;
        }
        h = hn;
    }
    double y = net.weights.head_b(0);
    for (Eigen::Index k = 0; k < H; ++k) y += net.weights.head_w(k) * h[k];
    return y;
}

// ---------------------------------------------------------------------------
// Generators

inline Vec white_noise(std::size_t n, std::uint64_t seed, double sd = 1.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> dist(0.0, sd);
    Vec out(n);
    for (auto& v : out) v = dist(rng);
    return out;
}

inline Vec cumsum(const Vec& x, double start = 0.0) {
    Vec out(x.size());
    double s = start;
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = (s += x[i]);
    return out;
}

/// AR(1) around `mean` with a 200-step burn-in.
inline Vec ar1(std::size_t n, double phi, std::uint64_t seed, double mean = 0.0) {
    const auto e = white_noise(n + 200, seed);
    Vec out;
    double x = 0.0;
    for (std::size_t t = 0; t < e.size(); ++t) {
        x = phi * x + e[t];
        if (t >= 200) out.push_back(mean + x);
    }
    return out;
}

/// ARMA(1,1) with the plus sign on the MA term.
inline Vec arma11(std::size_t n, double phi, double theta, std::uint64_t seed) {
    const auto e = white_noise(n + 200, seed);
    Vec out;
    double x = 0.0, prev_e = 0.0;
    for (std::size_t t = 0; t < e.size(); ++t) {
        x = phi * x + e[t] + theta * prev_e;
        prev_e = e[t];
        if (t >= 200) out.push_back(x);
    }
    return out;
}

inline Vec sine(std::size_t n, double period = 50.0, double level = 100.0, double amplitude = 10.0) {
    Vec out(n);
    for (std::size_t t = 0; t < n; ++t)
        out[t] = level + amplitude * std::sin(2.0 * std::numbers::pi * static_cast<double>(t) / period);
    return out;
}

/// A valid OHLCV table on consecutive calendar days whose Close is `close`.
inline horizonbench::TimeSeriesTable table_from_close(const Vec& close, std::string symbol = "SYN") {
    using namespace std::chrono;
    horizonbench::TimeSeriesTable table;
    table.symbol = std::move(symbol);
    const sys_days first = 2015y / January / 1;
    for (std::size_t t = 0; t < close.size(); ++t) {
        const double v = close[t];
        table.bars.push_back({first + days(static_cast<int>(t)), v, v + 0.5, v - 0.5, v, v, 1000});
    }
    return table;
}

}  // namespace oracle

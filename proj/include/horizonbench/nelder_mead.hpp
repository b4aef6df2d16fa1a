#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <numeric>
#include <vector>

#include <Eigen/Dense>

namespace horizonbench {

struct NelderMeadOptions {
    double initial_step = 0.1;
    /// Converged once every vertex lies within this infinity-norm distance
    /// of the best vertex.
    double spread_tolerance = 1e-8;
    int max_iterations = 2000;
};

struct NelderMeadResult {
    Eigen::VectorXd x;
    double value = 0.0;
    int iterations = 0;
    bool converged = false;
    /// Best objective value after each iteration (non-increasing).
    std::vector<double> best_trace;
};

/// Derivative-free simplex minimisation (reflection 1, expansion 2,
/// contraction 1/2, shrink 1/2). Deterministic: the start simplex is
/// x0 plus `initial_step` along each coordinate axis.
template <class F>
    requires std::invocable<F&, const Eigen::VectorXd&>
NelderMeadResult nelder_mead(F&& objective, const Eigen::VectorXd& x0, const NelderMeadOptions& opt = {}) {
    const Eigen::Index n = x0.size();
    std::vector<Eigen::VectorXd> vertex(static_cast<std::size_t>(n + 1), x0);
    std::vector<double> value(static_cast<std::size_t>(n + 1));
    for (Eigen::Index i = 0; i < n; ++i) vertex[static_cast<std::size_t>(i + 1)](i) += opt.initial_step;
    for (std::size_t i = 0; i < vertex.size(); ++i) value[i] = objective(vertex[i]);

    std::vector<std::size_t> order(vertex.size());
    auto sort_vertices = [&] {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return value[a] < value[b]; });
    };
    auto spread = [&] {
        const auto& best = vertex[order.front()];
        double s = 0.0;
        for (const auto& v : vertex) s = std::max(s, (v - best).cwiseAbs().maxCoeff());
        return s;
    };

    NelderMeadResult res;
    sort_vertices();
    if (n == 0) {
        res.x = x0;
        res.value = value[0];
        res.converged = true;
        return res;
    }

    while (res.iterations < opt.max_iterations) {
        if (spread() < opt.spread_tolerance) {
            res.converged = true;
            break;
        }
        ++res.iterations;
        const std::size_t best = order.front();
        const std::size_t worst = order.back();
        const std::size_t second = order[order.size() - 2];

        Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
        for (std::size_t k = 0; k + 1 < order.size(); ++k) centroid += vertex[order[k]];
        centroid /= static_cast<double>(n);

        const Eigen::VectorXd reflected = centroid + (centroid - vertex[worst]);
        const double f_reflected = objective(reflected);
        if (f_reflected < value[best]) {
            const Eigen::VectorXd expanded = centroid + 2.0 * (centroid - vertex[worst]);
            const double f_expanded = objective(expanded);
            if (f_expanded < f_reflected) {
                vertex[worst] = expanded;
                value[worst] = f_expanded;
            } else {
                vertex[worst] = reflected;
                value[worst] = f_reflected;
            }
        } else if (f_reflected < value[second]) {
            vertex[worst] = reflected;
            value[worst] = f_reflected;
        } else {
            const bool outside = f_reflected < value[worst];
            const Eigen::VectorXd contracted = outside ? Eigen::VectorXd(centroid + 0.5 * (reflected - centroid))
                                                       : Eigen::VectorXd(centroid + 0.5 * (vertex[worst] - centroid));
            const double f_contracted = objective(contracted);
            if (f_contracted < (outside ? f_reflected : value[worst])) {
                vertex[worst] = contracted;
                value[worst] = f_contracted;
            } else {
                for (std::size_t k = 1; k < order.size(); ++k) {
                    auto& v = vertex[order[k]];
                    v = vertex[best] + 0.5 * (v - vertex[best]);
                    value[order[k]] = objective(v);
                }
            }
        }
        sort_vertices();
        res.best_trace.push_back(value[order.front()]);
    }
    if (!res.converged && spread() < opt.spread_tolerance) res.converged = true;
    res.x = vertex[order.front()];
    res.value = value[order.front()];
    return res;
}

}  // namespace horizonbench

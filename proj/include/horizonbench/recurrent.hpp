#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "horizonbench/errors.hpp"
#include "horizonbench/preprocess.hpp"
#include "horizonbench/recurrent_cells.hpp"

namespace horizonbench {

template <class Cell>
concept RecurrentCell = requires { typename Cell::Params; typename Cell::State; typename Cell::Carry; };

/// Cell weights plus the scalar linear head `prediction = head_w . h + head_b`.
template <RecurrentCell Cell>
struct NetworkWeights {
    typename Cell::Params cell;
    Eigen::VectorXd head_w;
    Eigen::VectorXd head_b;  // size 1

    static NetworkWeights zeros(Eigen::Index hidden, Eigen::Index input = 1) {
        return {Cell::Params::zeros(hidden, input), Eigen::VectorXd::Zero(hidden), Eigen::VectorXd::Zero(1)};
    }
};

template <class T>
inline constexpr bool is_network_weights = false;
template <RecurrentCell Cell>
inline constexpr bool is_network_weights<NetworkWeights<Cell>> = true;

/// Visits cell tensors, then head_w and head_b, across one or more weight
/// sets of the same shape (e.g. weights, gradients, moments).
template <class F, class... W>
    requires(is_network_weights<std::remove_const_t<W>> && ...)
void for_each_tensor(F&& f, W&... w) {
    for_each_tensor(f, w.cell...);
    f("head_w", w.head_w...);
    f("head_b", w.head_b...);
}

/// One recurrent layer over a scalar input sequence with a linear head.
template <RecurrentCell Cell>
struct RecurrentNetwork {
    NetworkWeights<Cell> weights;
    std::uint64_t seed = 0;

    static constexpr CellKind kind = Cell::kind;
    Eigen::Index hidden_size() const { return weights.cell.hidden_size(); }
    Eigen::Index input_size() const { return weights.cell.input_size(); }

    /// All-zero weights; prediction is head_b for any window.
    static RecurrentNetwork zeros(Eigen::Index hidden, Eigen::Index input = 1) {
        return {NetworkWeights<Cell>::zeros(hidden, input), 0};
    }
};

using LstmNetwork = RecurrentNetwork<Lstm>;
using GruNetwork = RecurrentNetwork<Gru>;

/// Fills every weight uniformly in +/- 1/sqrt(hidden) from a generator
/// seeded with `seed`, visiting tensors in their fixed order.
template <RecurrentCell Cell>
void initialize_weights(RecurrentNetwork<Cell>& net, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const double bound = 1.0 / std::sqrt(static_cast<double>(net.hidden_size()));
    std::uniform_real_distribution<double> dist(-bound, bound);
    for_each_tensor([&](std::string_view, auto& w) {
        for (Eigen::Index k = 0; k < w.size(); ++k) w.data()[k] = dist(rng);
    }, net.weights);
    net.seed = seed;
}

template <RecurrentCell Cell>
RecurrentNetwork<Cell> make_network(Eigen::Index hidden, std::uint64_t seed) {
    auto net = RecurrentNetwork<Cell>::zeros(hidden, 1);
    initialize_weights(net, seed);
    return net;
}

// ---------------------------------------------------------------------------
// Forward pass

/// States for every step of a batched unroll; states[0] is the zero state.
template <RecurrentCell Cell>
struct ForwardCache {
    Eigen::MatrixXd inputs;  // B x w, one window per row
    std::vector<typename Cell::State> states;
    Eigen::RowVectorXd predictions;
    std::size_t cell_evaluations = 0;
};

template <RecurrentCell Cell>
ForwardCache<Cell> forward_batch(const RecurrentNetwork<Cell>& net, const Eigen::MatrixXd& windows) {
    if (windows.cols() < 1) throw InputError("forward: empty window");
    if (net.input_size() != 1) throw InputError("forward: network input size must be 1");
    const Eigen::Index batch = windows.rows();
    ForwardCache<Cell> cache;
    cache.inputs = windows;
    cache.states.reserve(static_cast<std::size_t>(windows.cols()) + 1);
    cache.states.push_back(Cell::initial(net.weights.cell, batch));
    for (Eigen::Index t = 0; t < windows.cols(); ++t) {
        const Eigen::MatrixXd x = windows.col(t).transpose();
        cache.states.push_back(Cell::step(net.weights.cell, x, cache.states.back()));
        ++cache.cell_evaluations;
    }
    cache.predictions = (net.weights.head_w.transpose() * cache.states.back().h).array() + net.weights.head_b(0);
    return cache;
}

template <RecurrentCell Cell>
struct ForwardResult {
    double prediction = 0.0;
    ForwardCache<Cell> cache;
};

/// Runs one window through the network from a zero state.
template <RecurrentCell Cell>
ForwardResult<Cell> forward(const RecurrentNetwork<Cell>& net, std::span<const double> window) {
    if (window.empty()) throw InputError("forward: empty window");
    Eigen::MatrixXd w(1, static_cast<Eigen::Index>(window.size()));
    for (std::size_t t = 0; t < window.size(); ++t) w(0, static_cast<Eigen::Index>(t)) = window[t];
    detail::require_finite(w, "forward");
    auto cache = forward_batch(net, w);
    const double pred = cache.predictions(0);
    return {pred, std::move(cache)};
}

/// Predictions for every sample of a dataset, in order.
template <RecurrentCell Cell>
std::vector<double> predict(const RecurrentNetwork<Cell>& net, const WindowedDataset& data, std::size_t chunk = 256) {
    std::vector<double> out;
    out.reserve(data.size());
    for (std::size_t first = 0; first < data.size(); first += chunk) {
        const std::size_t count = std::min(chunk, data.size() - first);
        Eigen::MatrixXd w(static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(data.window));
        for (std::size_t i = 0; i < count; ++i)
            for (std::size_t t = 0; t < data.window; ++t)
                w(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(t)) = data.inputs[(first + i) * data.window + t];
        const auto cache = forward_batch(net, w);
        for (Eigen::Index i = 0; i < cache.predictions.size(); ++i) out.push_back(cache.predictions(i));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Backpropagation through time

template <RecurrentCell Cell>
struct GradientResult {
    NetworkWeights<Cell> gradients;
    double loss = 0.0;
    /// Global L2 norm before clipping.
    double norm = 0.0;
    bool clipped = false;
};

namespace detail {

inline Eigen::MatrixXd window_matrix(const WindowedDataset& data) {
    Eigen::MatrixXd w(static_cast<Eigen::Index>(data.size()), static_cast<Eigen::Index>(data.window));
    for (std::size_t i = 0; i < data.size(); ++i)
        for (std::size_t t = 0; t < data.window; ++t)
            w(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(t)) = data.inputs[i * data.window + t];
    return w;
}

inline Eigen::RowVectorXd target_vector(const WindowedDataset& data) {
    Eigen::RowVectorXd y(static_cast<Eigen::Index>(data.size()));
    for (std::size_t i = 0; i < data.size(); ++i) y(static_cast<Eigen::Index>(i)) = data.targets[i];
    return y;
}

template <RecurrentCell Cell>
GradientResult<Cell> bptt(const RecurrentNetwork<Cell>& net, const Eigen::MatrixXd& windows,
                          const Eigen::RowVectorXd& targets, double clip_norm) {
    const Eigen::Index batch = windows.rows();
    if (batch == 0) throw InputError("bptt_gradients: empty batch");
    const auto cache = forward_batch(net, windows);
    const Eigen::RowVectorXd err = cache.predictions - targets;

    GradientResult<Cell> out;
    out.loss = err.squaredNorm() / static_cast<double>(batch);
    if (!std::isfinite(out.loss)) throw NumericalError("bptt_gradients: non-finite loss");

    out.gradients = NetworkWeights<Cell>::zeros(net.hidden_size(), net.input_size());
    const Eigen::RowVectorXd d_pred = (2.0 / static_cast<double>(batch)) * err;
    out.gradients.head_w = cache.states.back().h * d_pred.transpose();
    out.gradients.head_b(0) = d_pred.sum();

    auto carry = Cell::zero_carry(net.weights.cell, batch);
    carry.dh = net.weights.head_w * d_pred;
    for (Eigen::Index t = windows.cols() - 1; t >= 0; --t) {
        const Eigen::MatrixXd x = windows.col(t).transpose();
        const auto ti = static_cast<std::size_t>(t);
        Cell::backward(net.weights.cell, x, cache.states[ti], cache.states[ti + 1], carry, out.gradients.cell);
    }

    double sq = 0.0;
    for_each_tensor([&](std::string_view, const auto& g) { sq += g.squaredNorm(); }, out.gradients);
    out.norm = std::sqrt(sq);
    if (!std::isfinite(out.norm)) throw NumericalError("bptt_gradients: non-finite gradient");
    if (clip_norm > 0.0 && out.norm > clip_norm) {
        const double scale = clip_norm / out.norm;
        for_each_tensor([&](std::string_view, auto& g) { g *= scale; }, out.gradients);
        out.clipped = true;
    }
    return out;
}

}  // namespace detail

/// Mean-squared-error loss over the batch and its exact gradients, averaged
/// over samples. A positive `clip_norm` rescales the gradient set so its
/// global L2 norm does not exceed it; zero disables clipping.
template <RecurrentCell Cell>
GradientResult<Cell> bptt_gradients(const RecurrentNetwork<Cell>& net, const WindowedDataset& batch,
                                    double clip_norm = 0.0) {
    if (batch.size() == 0) throw InputError("bptt_gradients: empty batch");
    return detail::bptt(net, detail::window_matrix(batch), detail::target_vector(batch), clip_norm);
}

// ---------------------------------------------------------------------------
// Adam

struct TrainConfig {
    int epochs = 100;
    std::size_t batch_size = 32;
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps_adam = 1e-8;
    double grad_clip_norm = 5.0;
    std::uint64_t seed = 7;

    void validate() const {
        detail::require(epochs >= 1, "epochs must be at least 1");
        detail::require(batch_size >= 1, "batch_size must be at least 1");
        detail::require(learning_rate > 0.0, "learning_rate must be positive");
        detail::require(beta1 > 0.0 && beta1 < 1.0, "beta1 must lie in (0, 1)");
        detail::require(beta2 > 0.0 && beta2 < 1.0, "beta2 must lie in (0, 1)");
        detail::require(eps_adam > 0.0, "eps_adam must be positive");
        detail::require(grad_clip_norm >= 0.0, "grad_clip_norm must be non-negative");
    }

    bool operator==(const TrainConfig&) const = default;
};

template <RecurrentCell Cell>
struct AdamState {
    NetworkWeights<Cell> m;
    NetworkWeights<Cell> v;
    long step = 0;

    static AdamState zeros(Eigen::Index hidden, Eigen::Index input = 1) {
        return {NetworkWeights<Cell>::zeros(hidden, input), NetworkWeights<Cell>::zeros(hidden, input), 0};
    }
};

/// One bias-corrected Adam update of `weights` in place.
template <RecurrentCell Cell>
void adam_step(AdamState<Cell>& state, NetworkWeights<Cell>& weights, const NetworkWeights<Cell>& grads,
               const TrainConfig& config) {
    bool finite = true;
    for_each_tensor([&](std::string_view, const auto& g) { finite = finite && g.allFinite(); }, grads);
    if (!finite) throw NumericalError("adam_step: non-finite gradient");

    ++state.step;
    const double c1 = 1.0 - std::pow(config.beta1, static_cast<double>(state.step));
    const double c2 = 1.0 - std::pow(config.beta2, static_cast<double>(state.step));
    for_each_tensor(
        [&](std::string_view, auto& w, const auto& g, auto& m, auto& v) {
            m = config.beta1 * m + (1.0 - config.beta1) * g;
            v = (config.beta2 * v.array() + (1.0 - config.beta2) * g.array().square()).matrix();
            w.array() -= config.learning_rate * (m.array() / c1) / ((v.array() / c2).sqrt() + config.eps_adam);
        },
        weights, grads, state.m, state.v);
}

// ---------------------------------------------------------------------------
// Training

template <RecurrentCell Cell>
struct TrainResult {
    RecurrentNetwork<Cell> network;
    /// Sample-weighted mean training loss of each epoch.
    std::vector<double> loss_history;
    long adam_steps = 0;
};

/// Re-initialises the weights of `net` from `config.seed`, then runs Adam
/// over chronological mini-batches (no shuffling). Deterministic given
/// (seed, data, config). Divergence raises NumericalError naming the epoch.
template <RecurrentCell Cell>
TrainResult<Cell> train(RecurrentNetwork<Cell> net, const WindowedDataset& data, const TrainConfig& config) {
    config.validate();
    if (data.size() == 0) throw InputError("train: empty dataset");
    initialize_weights(net, config.seed);

    struct Batch {
        Eigen::MatrixXd windows;
        Eigen::RowVectorXd targets;
    };
    std::vector<Batch> batches;
    for (std::size_t first = 0; first < data.size(); first += config.batch_size) {
        const auto part = data.slice(first, std::min(config.batch_size, data.size() - first));
        batches.push_back({detail::window_matrix(part), detail::target_vector(part)});
    }

    TrainResult<Cell> result;
    auto adam = AdamState<Cell>::zeros(net.hidden_size(), net.input_size());
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        double weighted = 0.0;
        for (const auto& b : batches) {
            GradientResult<Cell> g;
            try {
                g = detail::bptt(net, b.windows, b.targets, config.grad_clip_norm);
                adam_step(adam, net.weights, g.gradients, config);
            } catch (const NumericalError& e) {
                throw NumericalError("train: diverged in epoch " + std::to_string(epoch + 1) + ": " + e.what());
            }
            weighted += g.loss * static_cast<double>(b.windows.rows());
        }
        result.loss_history.push_back(weighted / static_cast<double>(data.size()));
    }
    result.adam_steps = adam.step;
    result.network = std::move(net);
    return result;
}

// ---------------------------------------------------------------------------
// Gradient check

/// Worst relative error between analytic gradients and central differences
/// over every parameter, on the unclipped mean-squared loss of `sample`.
/// Relative error is |a - n| / max(|a| + |n|, floor); the floor keeps
/// parameters with vanishing gradients from dividing by zero.
template <RecurrentCell Cell>
double grad_check(RecurrentNetwork<Cell> net, const WindowedDataset& sample, double eps = 1e-5,
                  double floor = 1e-7) {
    if (!(eps >= 1e-7 && eps <= 1e-3)) throw InputError("grad_check: eps must lie in [1e-7, 1e-3]");
    const Eigen::MatrixXd windows = detail::window_matrix(sample);
    const Eigen::RowVectorXd targets = detail::target_vector(sample);
    const auto analytic = detail::bptt(net, windows, targets, 0.0);
    auto loss = [&] {
        const auto cache = forward_batch(net, windows);
        return (cache.predictions - targets).squaredNorm() / static_cast<double>(windows.rows());
    };

    double worst = 0.0;
    for_each_tensor(
        [&](std::string_view, auto& w, const auto& g) {
            for (Eigen::Index k = 0; k < w.size(); ++k) {
                const double orig = w.data()[k];
                w.data()[k] = orig + eps;
                const double up = loss();
                w.data()[k] = orig - eps;
                const double down = loss();
                w.data()[k] = orig;
                const double numeric = (up - down) / (2.0 * eps);
                const double a = g.data()[k];
                const double rel = std::abs(a - numeric) / std::max(std::abs(a) + std::abs(numeric), floor);
                worst = std::max(worst, rel);
            }
        },
        net.weights, analytic.gradients);
    return worst;
}

}  // namespace horizonbench

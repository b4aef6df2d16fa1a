#pragma once

#include <concepts>
#include <string_view>

#include <Eigen/Dense>

#include "horizonbench/errors.hpp"

namespace horizonbench {

enum class CellKind { Lstm, Gru };

inline constexpr std::string_view cell_name(CellKind k) { return k == CellKind::Lstm ? "lstm" : "gru"; }

namespace detail {

inline Eigen::MatrixXd sigmoid(const Eigen::MatrixXd& a) {
    return (1.0 + (-a.array()).exp()).inverse().matrix();
}

inline void require_finite(const Eigen::MatrixXd& x, const char* what) {
    if (!x.allFinite()) throw InputError(std::string(what) + ": non-finite input");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// LSTM (no peepholes, additive biases)
//
//   i = sig(W_xi x + W_hi h + b_i)      f = sig(W_xf x + W_hf h + b_f)
//   g = tanh(W_xg x + W_hg h + b_g)     o = sig(W_xo x + W_ho h + b_o)
//   c' = f * c + i * g                  h' = o * tanh(c')
//
// All step functions are batched: x is (input x B), states are (hidden x B).

struct LstmParams {
    Eigen::MatrixXd w_xi, w_xf, w_xg, w_xo;
    Eigen::MatrixXd w_hi, w_hf, w_hg, w_ho;
    Eigen::VectorXd b_i, b_f, b_g, b_o;

    Eigen::Index hidden_size() const { return w_hi.rows(); }
    Eigen::Index input_size() const { return w_xi.cols(); }

    static LstmParams zeros(Eigen::Index hidden, Eigen::Index input) {
        LstmParams p;
        for (auto* w : {&p.w_xi, &p.w_xf, &p.w_xg, &p.w_xo}) *w = Eigen::MatrixXd::Zero(hidden, input);
        for (auto* w : {&p.w_hi, &p.w_hf, &p.w_hg, &p.w_ho}) *w = Eigen::MatrixXd::Zero(hidden, hidden);
        for (auto* b : {&p.b_i, &p.b_f, &p.b_g, &p.b_o}) *b = Eigen::VectorXd::Zero(hidden);
        return p;
    }
};

/// Visits the tensors of one or more LstmParams in a fixed order.
template <class F, class... P>
    requires(std::same_as<std::remove_const_t<P>, LstmParams> && ...)
void for_each_tensor(F&& f, P&... p) {
    f("w_xi", p.w_xi...);
    f("w_xf", p.w_xf...);
    f("w_xg", p.w_xg...);
    f("w_xo", p.w_xo...);
    f("w_hi", p.w_hi...);
    f("w_hf", p.w_hf...);
    f("w_hg", p.w_hg...);
    f("w_ho", p.w_ho...);
    f("b_i", p.b_i...);
    f("b_f", p.b_f...);
    f("b_g", p.b_g...);
    f("b_o", p.b_o...);
}

/// State after a step plus the gate activations needed for backprop.
struct LstmState {
    Eigen::MatrixXd h, c;
    Eigen::MatrixXd i, f, g, o;

    static LstmState zeros(Eigen::Index hidden, Eigen::Index batch) {
        LstmState s;
        s.h = s.c = Eigen::MatrixXd::Zero(hidden, batch);
        return s;
    }
};

struct Lstm {
    using Params = LstmParams;
    using State = LstmState;
    static constexpr CellKind kind = CellKind::Lstm;

    struct Carry {
        Eigen::MatrixXd dh, dc;
    };

    static State initial(const Params& p, Eigen::Index batch) { return State::zeros(p.hidden_size(), batch); }

    static State step(const Params& p, const Eigen::MatrixXd& x, const State& prev) {
        State s;
        s.i = detail::sigmoid(((p.w_xi * x + p.w_hi * prev.h).colwise() + p.b_i).eval());
        s.f = detail::sigmoid(((p.w_xf * x + p.w_hf * prev.h).colwise() + p.b_f).eval());
        s.g = ((p.w_xg * x + p.w_hg * prev.h).colwise() + p.b_g).array().tanh().matrix();
        s.o = detail::sigmoid(((p.w_xo * x + p.w_ho * prev.h).colwise() + p.b_o).eval());
        s.c = (s.f.array() * prev.c.array() + s.i.array() * s.g.array()).matrix();
        s.h = (s.o.array() * s.c.array().tanh()).matrix();
        return s;
    }

    static Carry zero_carry(const Params& p, Eigen::Index batch) {
        return {Eigen::MatrixXd::Zero(p.hidden_size(), batch), Eigen::MatrixXd::Zero(p.hidden_size(), batch)};
    }

    /// On entry `carry` holds dL/dh and dL/dc at `cur`; on exit, at `prev`.
    static void backward(const Params& p, const Eigen::MatrixXd& x, const State& prev, const State& cur, Carry& carry,
                         Params& grad) {
        const Eigen::ArrayXXd tanh_c = cur.c.array().tanh();
        const Eigen::ArrayXXd d_o = carry.dh.array() * tanh_c;
        const Eigen::ArrayXXd d_c = carry.dc.array() + carry.dh.array() * cur.o.array() * (1.0 - tanh_c.square());
        const Eigen::MatrixXd a_i = (d_c * cur.g.array() * cur.i.array() * (1.0 - cur.i.array())).matrix();
        const Eigen::MatrixXd a_f = (d_c * prev.c.array() * cur.f.array() * (1.0 - cur.f.array())).matrix();
        const Eigen::MatrixXd a_g = (d_c * cur.i.array() * (1.0 - cur.g.array().square())).matrix();
        const Eigen::MatrixXd a_o = (d_o * cur.o.array() * (1.0 - cur.o.array())).matrix();

        const Eigen::MatrixXd xt = x.transpose();
        const Eigen::MatrixXd ht = prev.h.transpose();
        grad.w_xi.noalias() += a_i * xt;
        grad.w_xf.noalias() += a_f * xt;
        grad.w_xg.noalias() += a_g * xt;
        grad.w_xo.noalias() += a_o * xt;
        grad.w_hi.noalias() += a_i * ht;
        grad.w_hf.noalias() += a_f * ht;
        grad.w_hg.noalias() += a_g * ht;
        grad.w_ho.noalias() += a_o * ht;
        grad.b_i += a_i.rowwise().sum();
        grad.b_f += a_f.rowwise().sum();
        grad.b_g += a_g.rowwise().sum();
        grad.b_o += a_o.rowwise().sum();

        carry.dc = (d_c * cur.f.array()).matrix();
        carry.dh.noalias() = p.w_hi.transpose() * a_i;
        carry.dh.noalias() += p.w_hf.transpose() * a_f;
        carry.dh.noalias() += p.w_hg.transpose() * a_g;
        carry.dh.noalias() += p.w_ho.transpose() * a_o;
    }
};

/// Single-sample LSTM step on column vectors.
inline LstmState lstm_cell(const LstmParams& p, const Eigen::VectorXd& x, const LstmState& prev) {
    if (x.size() != p.input_size() || prev.h.rows() != p.hidden_size() || prev.c.rows() != p.hidden_size() ||
        prev.h.cols() != 1 || prev.c.cols() != 1)
        throw InputError("lstm_cell: shape mismatch");
    detail::require_finite(x, "lstm_cell");
    return Lstm::step(p, x, prev);
}

// ---------------------------------------------------------------------------
// GRU
//
//   z = sig(W_xz x + W_hz h + b_z)      r = sig(W_xr x + W_hr h + b_r)
//   n = tanh(W_xh x + r * (W_hh h) + b_h)
//   h' = (1 - z) * h + z * n

struct GruParams {
    Eigen::MatrixXd w_xz, w_xr, w_xh;
    Eigen::MatrixXd w_hz, w_hr, w_hh;
    Eigen::VectorXd b_z, b_r, b_h;

    Eigen::Index hidden_size() const { return w_hz.rows(); }
    Eigen::Index input_size() const { return w_xz.cols(); }

    static GruParams zeros(Eigen::Index hidden, Eigen::Index input) {
        GruParams p;
        for (auto* w : {&p.w_xz, &p.w_xr, &p.w_xh}) *w = Eigen::MatrixXd::Zero(hidden, input);
        for (auto* w : {&p.w_hz, &p.w_hr, &p.w_hh}) *w = Eigen::MatrixXd::Zero(hidden, hidden);
        for (auto* b : {&p.b_z, &p.b_r, &p.b_h}) *b = Eigen::VectorXd::Zero(hidden);
        return p;
    }
};

template <class F, class... P>
    requires(std::same_as<std::remove_const_t<P>, GruParams> && ...)
void for_each_tensor(F&& f, P&... p) {
    f("w_xz", p.w_xz...);
    f("w_xr", p.w_xr...);
    f("w_xh", p.w_xh...);
    f("w_hz", p.w_hz...);
    f("w_hr", p.w_hr...);
    f("w_hh", p.w_hh...);
    f("b_z", p.b_z...);
    f("b_r", p.b_r...);
    f("b_h", p.b_h...);
}

struct GruState {
    Eigen::MatrixXd h;
    Eigen::MatrixXd z, r, n;
    /// W_hh h_prev, reused by the reset-gate gradient.
    Eigen::MatrixXd u;

    static GruState zeros(Eigen::Index hidden, Eigen::Index batch) {
        GruState s;
        s.h = Eigen::MatrixXd::Zero(hidden, batch);
        return s;
    }
};

struct Gru {
    using Params = GruParams;
    using State = GruState;
    static constexpr CellKind kind = CellKind::Gru;

    struct Carry {
        Eigen::MatrixXd dh;
    };

    static State initial(const Params& p, Eigen::Index batch) { return State::zeros(p.hidden_size(), batch); }

    static State step(const Params& p, const Eigen::MatrixXd& x, const State& prev) {
        State s;
        s.z = detail::sigmoid(((p.w_xz * x + p.w_hz * prev.h).colwise() + p.b_z).eval());
        s.r = detail::sigmoid(((p.w_xr * x + p.w_hr * prev.h).colwise() + p.b_r).eval());
        s.u = p.w_hh * prev.h;
        s.n = (((p.w_xh * x).array() + s.r.array() * s.u.array()).matrix().colwise() + p.b_h).array().tanh().matrix();
        s.h = ((1.0 - s.z.array()) * prev.h.array() + s.z.array() * s.n.array()).matrix();
        return s;
    }

    static Carry zero_carry(const Params& p, Eigen::Index batch) {
        return {Eigen::MatrixXd::Zero(p.hidden_size(), batch)};
    }

    static void backward(const Params& p, const Eigen::MatrixXd& x, const State& prev, const State& cur, Carry& carry,
                         Params& grad) {
        const Eigen::ArrayXXd dh = carry.dh.array();
        const Eigen::ArrayXXd d_z = dh * (cur.n.array() - prev.h.array());
        const Eigen::MatrixXd a_n = (dh * cur.z.array() * (1.0 - cur.n.array().square())).matrix();
        const Eigen::MatrixXd d_u = (a_n.array() * cur.r.array()).matrix();
        const Eigen::MatrixXd a_r = (a_n.array() * cur.u.array() * cur.r.array() * (1.0 - cur.r.array())).matrix();
        const Eigen::MatrixXd a_z = (d_z * cur.z.array() * (1.0 - cur.z.array())).matrix();

        const Eigen::MatrixXd xt = x.transpose();
        const Eigen::MatrixXd ht = prev.h.transpose();
        grad.w_xz.noalias() += a_z * xt;
        grad.w_xr.noalias() += a_r * xt;
        grad.w_xh.noalias() += a_n * xt;
        grad.w_hz.noalias() += a_z * ht;
        grad.w_hr.noalias() += a_r * ht;
        grad.w_hh.noalias() += d_u * ht;
        grad.b_z += a_z.rowwise().sum();
        grad.b_r += a_r.rowwise().sum();
        grad.b_h += a_n.rowwise().sum();

        Eigen::MatrixXd dh_prev = (dh * (1.0 - cur.z.array())).matrix();
        dh_prev.noalias() += p.w_hh.transpose() * d_u;
        dh_prev.noalias() += p.w_hz.transpose() * a_z;
        dh_prev.noalias() += p.w_hr.transpose() * a_r;
        carry.dh = std::move(dh_prev);
    }
};

/// Single-sample GRU step on column vectors; the returned state carries the
/// gate activations alongside h.
inline GruState gru_cell(const GruParams& p, const Eigen::VectorXd& x, const Eigen::VectorXd& h_prev) {
    if (x.size() != p.input_size() || h_prev.size() != p.hidden_size()) throw InputError("gru_cell: shape mismatch");
    detail::require_finite(x, "gru_cell");
    GruState prev;
    prev.h = h_prev;
    return Gru::step(p, x, prev);
}

}  // namespace horizonbench

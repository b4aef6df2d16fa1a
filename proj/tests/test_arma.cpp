#include <cmath>
#include <numeric>

#include <gtest/gtest.h>

#include "horizonbench/arma.hpp"
#include "horizonbench/io.hpp"
#include "oracles.hpp"

namespace hb = horizonbench;

TEST(NelderMead, MinimisesRosenbrock) {
    auto f = [](const Eigen::VectorXd& x) {
        return 100.0 * std::pow(x(1) - x(0) * x(0), 2) + std::pow(1.0 - x(0), 2);
    };
    Eigen::VectorXd x0(2);
    x0 << -1.2, 1.0;
    hb::NelderMeadOptions opt;
    opt.initial_step = 0.5;
    opt.max_iterations = 5000;
    const auto r = hb::nelder_mead(f, x0, opt);
    EXPECT_TRUE(r.converged);
    EXPECT_NEAR(r.x(0), 1.0, 1e-4);
    EXPECT_NEAR(r.x(1), 1.0, 1e-4);
    for (std::size_t i = 1; i < r.best_trace.size(); ++i) EXPECT_LE(r.best_trace[i], r.best_trace[i - 1]);
}

TEST(NelderMead, IterationLimitIsReportedNotThrown) {
    auto f = [](const Eigen::VectorXd& x) { return x.squaredNorm(); };
    hb::NelderMeadOptions opt;
    opt.max_iterations = 3;
    const auto r = hb::nelder_mead(f, Eigen::VectorXd::Constant(3, 5.0), opt);
    EXPECT_FALSE(r.converged);
    EXPECT_EQ(r.iterations, 3);
}

TEST(Css, ResidualsByHand) {
    // z_t = 1 + 0.5 z_{t-1} + e_t + 0.2 e_{t-1}; e starts at t = 1.
    hb::ArmaParams p{{0.5}, {0.2}, 1.0};
    const std::vector<double> z{2.0, 3.0, 2.5, 1.0};
    const auto r = hb::css_residuals(p, z);
    ASSERT_EQ(r.residuals.size(), 3u);
    const double e1 = 3.0 - (1.0 + 0.5 * 2.0 + 0.2 * 0.0);
    const double e2 = 2.5 - (1.0 + 0.5 * 3.0 + 0.2 * e1);
    const double e3 = 1.0 - (1.0 + 0.5 * 2.5 + 0.2 * e2);
    EXPECT_DOUBLE_EQ(r.residuals[0], e1);
    EXPECT_DOUBLE_EQ(r.residuals[1], e2);
    EXPECT_DOUBLE_EQ(r.residuals[2], e3);
    EXPECT_DOUBLE_EQ(r.css, e1 * e1 + e2 * e2 + e3 * e3);
    EXPECT_THROW(hb::css_residuals(p, std::vector<double>{1.0}), hb::InputError);
}

TEST(FitArma, RecoversAr1) {
    const auto y = oracle::ar1(1000, 0.6, 3, 10.0);
    const auto m = hb::fit_arma(y, 1, 0);
    EXPECT_TRUE(m.converged);
    EXPECT_NEAR(m.params.ar[0], 0.6, 0.06);
    EXPECT_NEAR(m.params.intercept / (1.0 - m.params.ar[0]), 10.0, 0.3);
    EXPECT_EQ(m.residuals.size(), 999u);
    EXPECT_NEAR(m.aic, 999.0 * std::log(m.css / 999.0) + 2.0 * 2.0, 1e-9);
}

TEST(FitArma, RecoversArma11WithPlusSignMa) {
    const auto y = oracle::arma11(3000, 0.5, 0.3, 8);
    const auto m = hb::fit_arma(y, 1, 1);
    EXPECT_NEAR(m.params.ar[0], 0.5, 0.06);
    EXPECT_NEAR(m.params.ma[0], 0.3, 0.06);
}

TEST(FitArma, CssIsNoWorseThanStartOrTruth) {
    const auto y = oracle::arma11(500, 0.5, 0.3, 21);
    const auto m = hb::fit_arma(y, 1, 1);
    const double mean = std::accumulate(y.begin(), y.end(), 0.0) / double(y.size());
    EXPECT_LE(m.css, hb::css_residuals({{0.0}, {0.0}, mean}, y).css);
    EXPECT_LE(m.css, hb::css_residuals({{0.5}, {0.3}, 0.0}, y).css + 1e-6);
}

TEST(FitArma, CoefficientsStayInTheBox) {
    const auto y = oracle::cumsum(oracle::white_noise(400, 4));  // phi -> 1 unconstrained
    const auto m = hb::fit_arma(y, 1, 0);
    EXPECT_LE(std::abs(m.params.ar[0]), hb::kCoefficientBound);
}

TEST(FitArma, InputErrors) {
    EXPECT_THROW(hb::fit_arma(oracle::white_noise(29, 1), 1, 1), hb::InputError);
    EXPECT_THROW(hb::fit_arma(std::vector<double>(100, 2.0), 1, 0), hb::InputError);
    EXPECT_THROW(hb::fit_arma(oracle::white_noise(100, 1), -1, 0), hb::InputError);
}

TEST(FitArima, RandomWalkResidualsAreTheShocks) {
    auto e = oracle::white_noise(300, 12);
    const double mean = std::accumulate(e.begin() + 1, e.end(), 0.0) / 299.0;
    for (auto& v : e) v -= mean;
    const auto y = oracle::cumsum(e, 50.0);
    const auto m = hb::fit_arima(y, 0, 1, 0);
    EXPECT_EQ(m.d, 1);
    ASSERT_EQ(m.seeds.size(), 1u);
    EXPECT_DOUBLE_EQ(m.seeds[0], y[0]);
    EXPECT_NEAR(m.params.intercept, 0.0, 1e-6);
    ASSERT_EQ(m.residuals.size(), 299u);
    for (std::size_t i = 0; i < 299; ++i) EXPECT_NEAR(m.residuals[i], e[i + 1], 1e-6);
}

TEST(SelectOrder, GateAndGrid) {
    const auto walk = oracle::cumsum(oracle::white_noise(400, 30), 100.0);
    const auto s = hb::select_order(walk, {2, 2, {0, 1}});
    EXPECT_EQ(s.d, 1);
    EXPECT_FALSE(s.stationarity_fallback);
    EXPECT_EQ(s.adf_statistics.size(), 2u);
    EXPECT_EQ(s.candidates.size(), 9u);

    const auto ar = oracle::ar1(600, 0.6, 31);
    const auto t = hb::select_order(ar, {2, 2, {0, 1}});
    EXPECT_EQ(t.d, 0);
    EXPECT_EQ(t.adf_statistics.size(), 1u);
    EXPECT_GE(t.p + t.q, 1);
    for (const auto& c : t.candidates) EXPECT_GE(c.aic, t.aic - 1e-9 * std::abs(t.aic));
}

TEST(SelectOrder, SingleDSkipsTheGate) {
    const auto walk = oracle::cumsum(oracle::white_noise(200, 3));
    const auto s = hb::select_order(walk, {1, 0, {0}});
    EXPECT_EQ(s.d, 0);
    EXPECT_TRUE(s.adf_statistics.empty());
}

TEST(SelectOrder, DeterministicRecurrenceFallsBack) {
    const auto s = hb::select_order(oracle::sine(400), {1, 1, {0, 1}});
    EXPECT_TRUE(s.stationarity_fallback);
    EXPECT_EQ(s.d, 1);
    ASSERT_EQ(s.adf_statistics.size(), 2u);
    EXPECT_TRUE(std::isnan(s.adf_statistics[0]));
}

TEST(SelectOrder, TieBreaksTowardSmallerModels) {
    // Noise has no structure; bigger models buy at most a little CSS, and the
    // zero-order model must win whenever the AICs tie.
    const auto y = oracle::white_noise(300, 77);
    const auto s = hb::select_order(y, {1, 1, {0}});
    for (const auto& c : s.candidates)
        if (std::abs(c.aic - s.aic) <= 1e-9 * std::abs(s.aic)) {
            EXPECT_GE(c.p + c.q, s.p + s.q);
        }
}

TEST(Forecast, Ar1ClosedForm) {
    hb::ArimaModel m;
    m.params = {{0.5}, {}, 2.0};
    const std::vector<double> h{1.0, 3.0, 4.0};
    const auto f = hb::forecast(m, h, 3);
    EXPECT_DOUBLE_EQ(f[0], 2.0 + 0.5 * 4.0);
    EXPECT_DOUBLE_EQ(f[1], 2.0 + 0.5 * f[0]);
    EXPECT_DOUBLE_EQ(f[2], 2.0 + 0.5 * f[1]);
}

TEST(Forecast, IntegratesDifferences) {
    hb::ArimaModel m;
    m.params = {{}, {}, 0.5};
    m.d = 1;
    const std::vector<double> h{10.0, 11.0, 13.0};
    EXPECT_EQ(hb::forecast(m, h, 2), (std::vector<double>{13.5, 14.0}));
    m.d = 2;  // constant second difference
    EXPECT_EQ(hb::forecast(m, h, 2), (std::vector<double>{15.5, 18.5}));
}

TEST(Forecast, MaUsesHistoryResiduals) {
    hb::ArimaModel m;
    m.params = {{}, {0.4}, 1.0};
    const std::vector<double> h{1.0, 2.0, 0.5};
    const double e1 = 2.0 - 1.0;
    const double e2 = 0.5 - (1.0 + 0.4 * e1);
    const auto f = hb::forecast(m, h, 2);
    EXPECT_DOUBLE_EQ(f[0], 1.0 + 0.4 * e2);
    EXPECT_DOUBLE_EQ(f[1], 1.0);
}

TEST(Forecast, RollingEqualsPrefixForecasts) {
    const auto y = oracle::cumsum(oracle::ar1(260, 0.4, 5), 20.0);
    for (int d : {0, 1, 2}) {
        const auto m = hb::fit_arima(std::span<const double>(y).first(200), 2, d, 1);
        const auto roll = hb::rolling_one_step(m, std::span<const double>(y).first(200),
                                               std::span<const double>(y).subspan(200));
        ASSERT_EQ(roll.size(), 60u);
        for (std::size_t i = 0; i < roll.size(); ++i) {
            const auto f = hb::forecast(m, std::span<const double>(y).first(200 + i), 1);
            EXPECT_NEAR(roll[i], f[0], 1e-8 * std::max(1.0, std::abs(f[0]))) << "d=" << d << " i=" << i;
        }
    }
}

TEST(Forecast, HistoryTooShort) {
    hb::ArimaModel m;
    m.params = {{0.1, 0.2}, {}, 0.0};
    m.d = 1;
    EXPECT_THROW(hb::forecast(m, std::vector<double>{1, 2}, 1), hb::InputError);
    EXPECT_NO_THROW(hb::forecast(m, std::vector<double>{1, 2, 3}, 1));
    EXPECT_THROW(hb::forecast(m, std::vector<double>{1, 2, 3}, 0), hb::InputError);
}

TEST(ModelJson, RoundTrip) {
    const auto y = oracle::cumsum(oracle::white_noise(200, 8), 5.0);
    const auto m = hb::fit_arima(y, 1, 1, 1);
    const auto j = hb::arima_to_json(m);
    EXPECT_EQ(j.dump().substr(0, 20), R"({"p":1,"d":1,"q":1,")");
    const auto back = hb::arima_from_json(hb::Json::parse(j.dump()));
    EXPECT_EQ(back.params, m.params);
    EXPECT_EQ(back.d, 1);
    EXPECT_EQ(back.seeds, m.seeds);
    EXPECT_EQ(hb::forecast(back, y, 3), hb::forecast(m, y, 3));

    auto bad = j;
    bad["p"] = 2;
    EXPECT_THROW(hb::arima_from_json(bad), hb::InputError);
    bad = j;
    bad.erase("ma");
    EXPECT_THROW(hb::arima_from_json(bad), hb::InputError);
}

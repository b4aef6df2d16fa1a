#include <random>

#include <gtest/gtest.h>

#include "horizonbench/preprocess.hpp"
#include "oracles.hpp"

namespace hb = horizonbench;

TEST(Difference, KnownValues) {
    const std::vector<double> y{1, 4, 9, 16, 25};
    const auto d1 = hb::difference(y, 1);
    EXPECT_EQ(d1.values, (std::vector<double>{3, 5, 7, 9}));
    EXPECT_EQ(d1.seeds, (std::vector<double>{1}));
    const auto d2 = hb::difference(y, 2);
    EXPECT_EQ(d2.values, (std::vector<double>{2, 2, 2}));
    EXPECT_EQ(d2.seeds, (std::vector<double>{1, 3}));
    const auto d0 = hb::difference(y, 0);
    EXPECT_EQ(d0.values, y);
    EXPECT_TRUE(d0.seeds.empty());
}

TEST(Difference, RoundTripOnRandomSeries) {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> u(-100.0, 100.0);
    for (int rep = 0; rep < 200; ++rep) {
        std::vector<double> y(5 + rep % 40);
        for (auto& v : y) v = u(rng);
        for (int d : {0, 1, 2, 3}) {
            const auto back = hb::integrate(hb::difference(y, d));
            ASSERT_EQ(back.size(), y.size());
            for (std::size_t i = 0; i < y.size(); ++i) EXPECT_NEAR(back[i], y[i], 1e-9);
        }
    }
}

TEST(Difference, Errors) {
    const std::vector<double> y{1, 2};
    EXPECT_THROW(hb::difference(y, -1), hb::InputError);
    EXPECT_THROW(hb::difference(y, 2), hb::InputError);
    auto d = hb::difference(y, 1);
    d.seeds.clear();
    EXPECT_THROW(hb::integrate(d), hb::InputError);
}

TEST(Scaler, MapsTrainingRangeToUnitInterval) {
    const std::vector<double> train{10, 12, 20, 15};
    const auto s = hb::fit_minmax(train);
    EXPECT_DOUBLE_EQ(s.transform(10.0), 0.0);
    EXPECT_DOUBLE_EQ(s.transform(20.0), 1.0);
    EXPECT_DOUBLE_EQ(s.transform(25.0), 1.5);  // test data may leave [0, 1]
    EXPECT_DOUBLE_EQ(s.inverse(0.5), 15.0);
    const auto scaled = s.transform(train);
    const auto back = s.inverse(scaled);
    for (std::size_t i = 0; i < train.size(); ++i) EXPECT_NEAR(back[i], train[i], 1e-12);
}

TEST(Scaler, ConstantSeriesIsRejected) {
    EXPECT_THROW(hb::fit_minmax(std::vector<double>{3, 3, 3}), hb::InputError);
    EXPECT_THROW(hb::fit_minmax(std::vector<double>{}), hb::InputError);
}

TEST(Windows, InputsAndTargetsAreAligned) {
    const std::vector<double> y{0, 1, 2, 3, 4, 5};
    const auto ds = hb::make_windows(y, 3);
    ASSERT_EQ(ds.size(), 3u);
    EXPECT_EQ(std::vector<double>(ds.input(0).begin(), ds.input(0).end()), (std::vector<double>{0, 1, 2}));
    EXPECT_EQ(std::vector<double>(ds.input(2).begin(), ds.input(2).end()), (std::vector<double>{2, 3, 4}));
    EXPECT_EQ(ds.targets, (std::vector<double>{3, 4, 5}));
    const auto part = ds.slice(1, 2);
    EXPECT_EQ(part.targets, (std::vector<double>{4, 5}));
    EXPECT_EQ(part.input(0)[0], 1.0);
    EXPECT_THROW(ds.slice(2, 2), hb::InputError);
    EXPECT_THROW(hb::make_windows(y, 6), hb::InputError);
    EXPECT_THROW(hb::make_windows(y, 0), hb::InputError);
}

TEST(Horizons, RowCountsAndNames) {
    EXPECT_EQ(hb::horizon_rows(hb::Horizon::Short), 252u);
    EXPECT_EQ(hb::horizon_rows(hb::Horizon::Medium), 630u);
    EXPECT_EQ(hb::horizon_rows(hb::Horizon::Long), 1260u);
    EXPECT_EQ(hb::parse_horizon("Medium"), hb::Horizon::Medium);
    EXPECT_THROW(hb::parse_horizon("weekly"), hb::InputError);
}

TEST(Horizons, SplitTakesMostRecentRows) {
    const auto y = oracle::sine(2000);
    const auto s = hb::horizon_split(hb::make_series(y), hb::Horizon::Short);
    EXPECT_EQ(s.train.size(), 201u);  // floor(0.8 * 252)
    EXPECT_EQ(s.test.size(), 51u);
    EXPECT_EQ(s.test.values.back(), y.back());
    EXPECT_EQ(s.train.values.front(), y[2000 - 252]);
}

TEST(Horizons, ShortTablesAreClamped) {
    const auto t = oracle::table_from_close(oracle::sine(38));
    const auto s = hb::horizon_split(t, hb::Horizon::Long);
    EXPECT_EQ(s.train.size(), 30u);
    EXPECT_EQ(s.test.size(), 8u);
    EXPECT_TRUE(s.test.has_dates());
    EXPECT_LT(s.train.dates.back(), s.test.dates.front());
}

TEST(Horizons, TooFewRowsForATestSet) {
    EXPECT_THROW(hb::split_sizes(9, hb::Horizon::Short, 0.8), hb::InputError);
    EXPECT_NO_THROW(hb::split_sizes(10, hb::Horizon::Short, 0.8));
    EXPECT_EQ(hb::split_sizes(10, hb::Horizon::Short, 0.8).test, 2u);
    EXPECT_THROW(hb::split_sizes(100, hb::Horizon::Short, 1.0), hb::InputError);
}

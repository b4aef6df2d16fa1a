#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "horizonbench/bench.hpp"
#include "oracles.hpp"

namespace hb = horizonbench;
namespace fs = std::filesystem;

namespace {

hb::TimeSeriesTable fixture() {
    std::ifstream in(HORIZONBENCH_TEST_DATA "/table1_fixture.csv");
    std::stringstream s;
    s << in.rdbuf();
    return hb::parse_ohlcv_csv(s.str(), "FIX");
}

hb::BenchConfig small_config(std::vector<hb::ModelKind> models) {
    hb::BenchConfig c;
    c.data_path = "fixture.csv";
    c.models = std::move(models);
    c.horizons = {hb::Horizon::Short};
    c.seed = 1;
    c.window_length = 5;
    c.arma = {1, 1, {0}};
    c.arima = {1, 1, {0, 1}};
    for (auto* r : {&c.lstm, &c.gru}) {
        r->hidden = 4;
        r->train.epochs = 5;
        r->train.batch_size = 8;
    }
    return c;
}

fs::path fresh_dir(const std::string& name) {
    auto dir = fs::temp_directory_path() / ("horizonbench_" + name);
    fs::remove_all(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

}  // namespace

TEST(Bench, Sha256KnownAnswer) {
    EXPECT_EQ(hb::sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Bench, DerivedSeedsAreStableAndDistinct) {
    using M = hb::ModelKind;
    using H = hb::Horizon;
    EXPECT_EQ(hb::derive_seed(7, M::Lstm, H::Long), hb::derive_seed(7, M::Lstm, H::Long));
    std::set<std::uint64_t> seen;
    for (std::uint64_t g : {0u, 1u, 7u})
        for (auto m : {M::Arma, M::Arima, M::Lstm, M::Gru})
            for (auto h : {H::Short, H::Medium, H::Long}) seen.insert(hb::derive_seed(g, m, h));
    EXPECT_EQ(seen.size(), 36u);
}

TEST(Bench, FixtureSmokeRunArma) {
    const auto table = fixture();
    const auto report = hb::run_benchmark(small_config({hb::ModelKind::Arma}), table);
    ASSERT_EQ(report.cells.size(), 1u);
    const auto& c = report.cells[0];
    ASSERT_TRUE(c.ok()) << *c.error;
    EXPECT_EQ(c.trace.predicted.size(), 8u);  // 38 rows, floor(0.8 * 38) = 30 train
    EXPECT_EQ(c.trace.actual.size(), 8u);
    EXPECT_EQ(c.trace.dates.front(), "2019-02-14");
    EXPECT_TRUE(std::isfinite(c.metrics.rmse) && std::isfinite(c.metrics.r2));
    EXPECT_EQ(c.detail["d"], 0);
    EXPECT_EQ(report.dataset_sha256, hb::sha256_hex(hb::to_csv(table)));
    ASSERT_TRUE(report.adf.has_value());
}

TEST(Bench, StatisticalPredictionsUseOnlyThePrefix) {
    const auto table = fixture();
    auto cfg = small_config({hb::ModelKind::Arima});
    cfg.audit_leakage = true;
    const auto report = hb::run_benchmark(cfg, table);
    const auto& c = report.cells[0];
    ASSERT_TRUE(c.ok()) << *c.error;
    EXPECT_EQ(c.detail["leakage_audit"], "passed");
    const auto model = hb::arima_from_json(c.detail);
    const auto close = hb::select_series(table, hb::Column::Close).values;
    for (std::size_t i = 0; i < c.trace.predicted.size(); ++i) {
        const auto f = hb::forecast(model, std::span<const double>(close).first(30 + i), 1);
        EXPECT_EQ(c.trace.predicted[i], f[0]);
    }
}

TEST(Bench, FutureValuesDoNotChangeEarlierPredictions) {
    auto table = fixture();
    const auto cfg = small_config({hb::ModelKind::Arima, hb::ModelKind::Lstm, hb::ModelKind::Gru});
    const auto before = hb::run_benchmark(cfg, table);
    auto& last = table.bars.back();
    last.close = last.high = 30.0;
    const auto after = hb::run_benchmark(cfg, table);
    for (std::size_t k = 0; k < before.cells.size(); ++k) {
        ASSERT_TRUE(before.cells[k].ok());
        const auto& p = before.cells[k].trace.predicted;
        const auto& q = after.cells[k].trace.predicted;
        for (std::size_t i = 0; i < p.size(); ++i) EXPECT_EQ(p[i], q[i]) << k << "/" << i;
    }
}

TEST(Bench, CellFailuresAreRecordedAndIsolated) {
    auto cfg = small_config({hb::ModelKind::Lstm, hb::ModelKind::Arma});
    cfg.window_length = 40;  // longer than the 30-row training part
    cfg.horizons = {hb::Horizon::Short, hb::Horizon::Long};
    const auto report = hb::run_benchmark(cfg, fixture());
    ASSERT_EQ(report.cells.size(), 4u);
    EXPECT_EQ(report.cells[0].model, hb::ModelKind::Lstm);
    EXPECT_EQ(report.cells[1].horizon, hb::Horizon::Long);
    EXPECT_FALSE(report.cells[0].ok());
    EXPECT_FALSE(report.cells[1].ok());
    EXPECT_TRUE(report.cells[2].ok());
    EXPECT_TRUE(report.has_failures());
    const auto j = hb::report_to_json(report);
    EXPECT_EQ(j["cells"][0]["status"], "failed");
    EXPECT_TRUE(j["cells"][0]["metrics"].is_null());
    EXPECT_TRUE(j["cells"][0]["trace_file"].is_null());
    EXPECT_FALSE(j["cells"][0]["error"].get<std::string>().empty());
}

TEST(Bench, EmitsThreeFilesForOneCell) {
    const auto report = hb::run_benchmark(small_config({hb::ModelKind::Arma}), fixture());
    const auto dir = fresh_dir("emit");
    const auto written = hb::emit_report(report, {"json", "csv"}, dir);
    EXPECT_EQ(written.size(), 3u);
    std::size_t files = 0;
    for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir)) ++files;
    EXPECT_EQ(files, 3u);

    const auto summary = slurp(dir / "summary.csv");
    EXPECT_EQ(summary.substr(0, summary.find('\n')), "model,horizon,r2,rmse,mse,mae,mape");
    const auto trace = slurp(dir / "trace_arma_short.csv");
    EXPECT_EQ(trace.substr(0, trace.find('\n')), "date,actual,predicted");
    EXPECT_EQ(std::count(trace.begin(), trace.end(), '\n'), 9);

    const auto doc = hb::Json::parse(slurp(dir / "report.json"));
    EXPECT_EQ(doc["meta"]["dataset_sha256"].get<std::string>().size(), 64u);
    EXPECT_TRUE(doc["meta"]["adf"].contains("statistic"));
    EXPECT_TRUE(doc["meta"]["adf"].contains("p_value"));
    EXPECT_TRUE(doc["meta"]["adf"].contains("lags"));
    EXPECT_EQ(doc["meta"]["config"]["seed"], 1);
    const auto& cell = doc["cells"][0];
    for (const char* k : {"model", "horizon", "metrics", "seconds", "detail", "trace_file"})
        EXPECT_TRUE(cell.contains(k)) << k;
    const double mse = cell["metrics"]["mse"];
    const double rmse = cell["metrics"]["rmse"];
    EXPECT_EQ(std::sqrt(mse), rmse);
    fs::remove_all(dir);
}

TEST(Bench, JsonOnlyFormat) {
    const auto report = hb::run_benchmark(small_config({hb::ModelKind::Arma}), fixture());
    const auto dir = fresh_dir("jsononly");
    EXPECT_EQ(hb::emit_report(report, {"json"}, dir).size(), 1u);
    EXPECT_TRUE(hb::Json::parse(slurp(dir / "report.json"))["cells"][0]["trace_file"].is_null());
    fs::remove_all(dir);
}

TEST(Bench, UnwritableOutputDirectory) {
    const auto report = hb::run_benchmark(small_config({hb::ModelKind::Arma}), fixture());
    const auto dir = fresh_dir("blocked");
    { std::ofstream(dir.string()) << "not a directory"; }
    EXPECT_THROW(hb::emit_report(report, {"json"}, dir / "sub"), hb::Error);
    fs::remove(dir);
}

TEST(Bench, RepeatedRunsAreIdenticalWithoutTiming) {
    const auto cfg = small_config({hb::ModelKind::Arma, hb::ModelKind::Arima, hb::ModelKind::Lstm, hb::ModelKind::Gru});
    const auto a = hb::report_to_json(hb::run_benchmark(cfg, fixture()), false).dump();
    const auto b = hb::report_to_json(hb::run_benchmark(cfg, fixture()), false).dump();
    EXPECT_EQ(a, b);
    EXPECT_EQ(a.find("\"seconds\""), std::string::npos);
}

TEST(Bench, SummaryRowsSatisfyRmseSquaredIdentity) {
    const auto report = hb::run_benchmark(small_config({hb::ModelKind::Arma, hb::ModelKind::Gru}), fixture());
    std::istringstream in(hb::summary_csv(hb::report_to_json(report)));
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
        std::vector<std::string> f;
        std::stringstream ls(line);
        for (std::string x; std::getline(ls, x, ',');) f.push_back(x);
        ASSERT_GE(f.size(), 5u);
        const double rmse = *hb::parse_double(f[3]);
        const double mse = *hb::parse_double(f[4]);
        EXPECT_EQ(std::sqrt(mse), rmse) << line;
    }
}

TEST(Bench, LoadTableFromConfiguredFile) {
    auto cfg = small_config({hb::ModelKind::Arma});
    cfg.data_path = HORIZONBENCH_TEST_DATA "/table1_fixture.csv";
    EXPECT_EQ(hb::load_table(cfg).size(), 38u);
    cfg.data_path = "/nonexistent/prices.csv";
    EXPECT_THROW(hb::load_table(cfg), hb::InputError);
}

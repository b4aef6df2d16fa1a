// Runs all four models on a synthetic sine-wave price table and prints the
// summary CSV. Usage: sine_benchmark [output_dir]

#include <chrono>
#include <cmath>
#include <iostream>
#include <numbers>

#include "horizonbench/horizonbench.hpp"

namespace hb = horizonbench;

int main(int argc, char** argv) {
    using namespace std::chrono;
    hb::TimeSeriesTable table;
    table.symbol = "SINE";
    const sys_days first = 2019y / January / 1;
    for (int t = 0; t < 1260; ++t) {
        const double v = 100.0 + 10.0 * std::sin(2.0 * std::numbers::pi * t / 50.0);
        table.bars.push_back({first + days(t), v, v + 0.5, v - 0.5, v, v, 1000});
    }

    hb::BenchConfig cfg;
    cfg.data_path = "<generated>";
    cfg.models = {hb::ModelKind::Arma, hb::ModelKind::Arima, hb::ModelKind::Lstm, hb::ModelKind::Gru};
    cfg.horizons = {hb::Horizon::Long};
    cfg.seed = 7;
    cfg.output_dir = argc > 1 ? argv[1] : "sine-out";

    const auto report = hb::run_benchmark(cfg, table);
    hb::emit_report(report, cfg.formats, cfg.output_dir);
    for (const auto& c : report.cells)
        std::cerr << hb::model_name(c.model) << ": " << c.seconds << " s" << (c.ok() ? "" : " FAILED: " + *c.error)
                  << "\n";
    std::cout << hb::summary_csv(hb::report_to_json(report));
    return report.has_failures() ? 2 : 0;
}

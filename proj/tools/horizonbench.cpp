// horizonbench command-line front end.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "horizonbench/horizonbench.hpp"

namespace hb = horizonbench;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitCellFailures = 2;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw hb::InputError("cannot open " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_output(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw hb::Error("cannot write " + path);
    out << text;
}

hb::TimeSeriesTable load_csv(const std::string& path, const std::string& symbol = {}) {
    return hb::parse_ohlcv_csv(read_file(path), symbol);
}

hb::Date require_date(const std::string& text, const char* flag) {
    auto d = hb::parse_date(text);
    if (!d) throw hb::InputError(std::string(flag) + ": expected YYYY-MM-DD, got '" + text + "'");
    return *d;
}

std::string stats_csv(const hb::SummaryStats& s) {
    std::string out = "column,count,mean,std,min,q25,q50,q75,max\n";
    for (auto c : hb::kNumericColumns) {
        const auto& st = s[c];
        out += std::string(hb::column_name(c)) + "," + std::to_string(st.count);
        for (double v : {st.mean, st.std, st.min, st.q25, st.q50, st.q75, st.max}) out += "," + hb::format_double(v);
        out += "\n";
    }
    return out;
}

struct Options {
    std::uint64_t seed = 0;
    std::string csv;
    std::string out;
    std::string column = "Close";
    std::string symbol;

    // fetch
    std::string url, start, end;
    // adf / decompose
    std::optional<int> max_lag;
    std::size_t window = 0;
    // fit-arima
    std::string order;
    bool auto_order = false;
    int p_max = 3, q_max = 3;
    // train-rnn
    std::string cell = "lstm";
    int hidden = 64;
    std::size_t window_length = 30;
    double train_fraction = 0.8;
    hb::TrainConfig train;
    std::string weights_out;
    // benchmark / report
    std::string config;
    std::string out_dir;
    std::string format = "csv";
};

int cmd_ingest(const Options& o) {
    const auto table = load_csv(o.csv, o.symbol);
    write_output(o.out, hb::to_csv(table));
    std::cerr << "ingested " << table.size() << " rows\n";
    return kExitOk;
}

int cmd_fetch(const Options& o) {
    hb::FetchEndpoint ep;
    ep.base_url = o.url.empty() ? hb::data_url_from_env() : o.url;
    ep.symbol = o.symbol;
    ep.start = require_date(o.start, "--start");
    ep.end = require_date(o.end, "--end");
    const auto table = hb::fetch_ohlcv(ep);
    write_output(o.out, hb::to_csv(table));
    std::cerr << "fetched " << table.size() << " rows for " << o.symbol << "\n";
    return kExitOk;
}

int cmd_summary(const Options& o) {
    write_output(o.out, stats_csv(hb::summarize(load_csv(o.csv))));
    return kExitOk;
}

int cmd_adf(const Options& o) {
    const auto series = hb::select_series(load_csv(o.csv), o.column);
    const auto r = hb::adf_test(series.values, o.max_lag);
    hb::Json j;
    j["column"] = series.name;
    j["statistic"] = r.statistic;
    j["p_value"] = r.p_value;
    j["lags"] = r.lags_used;
    j["observations"] = r.observations;
    j["crit_1pct"] = r.crit_1pct;
    j["crit_5pct"] = r.crit_5pct;
    j["crit_10pct"] = r.crit_10pct;
    j["reject_at_5pct"] = r.reject_at_5pct;
    write_output(o.out, j.dump(2) + "\n");
    return kExitOk;
}

int cmd_decompose(const Options& o) {
    const auto series = hb::select_series(load_csv(o.csv), o.column);
    const auto dec = hb::decompose(series.values, o.window);
    std::string out = "index,trend,residual\n";
    for (std::size_t i = 0; i < dec.original.size(); ++i) {
        out += std::to_string(i) + ",";
        if (dec.trend[i]) out += hb::format_double(*dec.trend[i]);
        out += ",";
        if (dec.residual[i]) out += hb::format_double(*dec.residual[i]);
        out += "\n";
    }
    write_output(o.out, out);
    return kExitOk;
}

int cmd_fit_arima(const Options& o) {
    const auto series = hb::select_series(load_csv(o.csv), o.column);
    hb::ArimaModel model;
    hb::Json extra;
    if (o.auto_order) {
        hb::OrderSearch search;
        search.p_max = o.p_max;
        search.q_max = o.q_max;
        const auto sel = hb::select_order(series.values, search);
        model = hb::fit_arima(series.values, sel.p, sel.d, sel.q);
        extra["stationarity_fallback"] = sel.stationarity_fallback;
    } else {
        const auto parts = hb::detail::split_list(o.order);
        if (parts.size() != 3) throw hb::InputError("--order: expected p,d,q");
        int pdq[3];
        for (int i = 0; i < 3; ++i) {
            auto v = hb::parse_integer<int>(parts[i]);
            if (!v || *v < 0) throw hb::InputError("--order: '" + parts[i] + "' is not a non-negative integer");
            pdq[i] = *v;
        }
        model = hb::fit_arima(series.values, pdq[0], pdq[1], pdq[2]);
    }
    auto j = hb::arima_to_json(model);
    if (!o.out.empty()) write_output(o.out, j.dump(2) + "\n");
    j["css"] = model.css;
    j["converged"] = model.converged;
    j["iterations"] = model.iterations;
    for (auto& [k, v] : extra.items()) j[k] = v;
    std::cout << j.dump(2) << "\n";
    if (!model.converged) std::cerr << "warning: optimiser stopped at its iteration limit\n";
    return kExitOk;
}

template <hb::RecurrentCell Cell>
int train_rnn(const Options& o, const hb::Series& series) {
    const auto sizes_train = static_cast<std::size_t>(std::floor(o.train_fraction * double(series.size()) + 1e-9));
    hb::detail::require(o.train_fraction > 0.0 && o.train_fraction < 1.0, "--train-fraction must lie in (0, 1)");
    hb::detail::require(sizes_train > o.window_length && sizes_train < series.size(),
                        "series too short for the window length and train fraction");
    const std::span<const double> all(series.values);
    const auto scaler = hb::fit_minmax(all.first(sizes_train));
    const auto scaled = scaler.transform(all);
    const auto data = hb::make_windows(std::span<const double>(scaled).first(sizes_train), o.window_length);

    auto tc = o.train;
    tc.seed = o.seed;
    auto result = hb::train(hb::RecurrentNetwork<Cell>::zeros(o.hidden, 1), data, tc);

    std::vector<double> pred, actual;
    for (std::size_t t = sizes_train; t < series.size(); ++t) {
        std::span<const double> window(scaled.data() + t - o.window_length, o.window_length);
        pred.push_back(scaler.inverse(hb::forward(result.network, window).prediction));
        actual.push_back(series.values[t]);
    }
    const auto m = hb::evaluate(pred, actual);

    hb::Json j;
    j["cell"] = std::string(hb::cell_name(Cell::kind));
    j["seed"] = o.seed;
    j["train_rows"] = sizes_train;
    j["test_rows"] = actual.size();
    j["final_train_loss_scaled"] = result.loss_history.back();
    j["metrics"] = hb::detail::metrics_json(m);
    std::cout << j.dump(2) << "\n";
    if (!o.weights_out.empty()) write_output(o.weights_out, hb::weights_to_json(result.network).dump() + "\n");
    return kExitOk;
}

int cmd_train_rnn(const Options& o) {
    const auto series = hb::select_series(load_csv(o.csv), o.column);
    if (o.cell == "lstm") return train_rnn<hb::Lstm>(o, series);
    if (o.cell == "gru") return train_rnn<hb::Gru>(o, series);
    throw hb::InputError("--cell: expected lstm or gru, got '" + o.cell + "'");
}

int cmd_benchmark(const Options& o, bool seed_given) {
    auto cfg = hb::load_config(o.config);
    if (seed_given) cfg.seed = o.seed;
    if (!o.out_dir.empty()) cfg.output_dir = o.out_dir;
    const auto table = hb::load_table(cfg);
    const auto report = hb::run_benchmark(cfg, table);
    const auto files = hb::emit_report(report, cfg.formats, cfg.output_dir);
    for (const auto& c : report.cells) {
        std::cerr << hb::model_name(c.model) << "/" << hb::horizon_name(c.horizon) << ": ";
        if (c.ok())
            std::cerr << "rmse " << c.metrics.rmse << ", r2 " << c.metrics.r2;
        else
            std::cerr << "FAILED: " << *c.error;
        std::cerr << " (" << c.seconds << " s)\n";
    }
    std::cerr << "wrote " << files.size() << " files to " << cfg.output_dir << "\n";
    return report.has_failures() ? kExitCellFailures : kExitOk;
}

int cmd_report(const Options& o) {
    hb::Json doc;
    try {
        doc = hb::Json::parse(read_file(o.csv));
        if (!doc.contains("cells") || !doc["cells"].is_array()) throw hb::InputError("report: missing 'cells' array");
        if (o.format == "json") {
            write_output(o.out, doc.dump(2) + "\n");
        } else if (o.format == "csv") {
            write_output(o.out, hb::summary_csv(doc));
        } else {
            throw hb::InputError("--format: expected csv or json");
        }
    } catch (const hb::Json::exception& e) {
        throw hb::InputError(std::string("report: ") + e.what());
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"horizonbench: stock-price forecasting benchmark"};
    app.require_subcommand(1);
    Options o;

    auto seeded = [&](CLI::App* sub) {
        return sub->add_option("--seed", o.seed, "Random seed (used by stochastic commands)");
    };
    auto csv_arg = [&](CLI::App* sub) { sub->add_option("csv", o.csv, "OHLCV CSV file")->required(); };
    auto out_opt = [&](CLI::App* sub) { sub->add_option("-o,--out", o.out, "Output file (default stdout)"); };
    auto column_opt = [&](CLI::App* sub) {
        sub->add_option("--column", o.column, "Price column (Open, High, Low, Close, Adj Close, Volume)");
    };

    auto* ingest = app.add_subcommand("ingest", "Validate a CSV and print it in canonical form");
    csv_arg(ingest);
    out_opt(ingest);
    ingest->add_option("--symbol", o.symbol, "Symbol label");
    seeded(ingest);

    auto* fetch = app.add_subcommand("fetch", "Download OHLCV bars from the configured endpoint");
    fetch->add_option("--symbol", o.symbol, "Ticker symbol")->required();
    fetch->add_option("--start", o.start, "First date, YYYY-MM-DD")->required();
    fetch->add_option("--end", o.end, "Last date, YYYY-MM-DD")->required();
    fetch->add_option("--url", o.url, "Endpoint base URL (default $" + std::string(hb::kDataUrlEnv) + ")");
    out_opt(fetch);
    seeded(fetch);

    auto* summary = app.add_subcommand("summary", "Descriptive statistics per column");
    csv_arg(summary);
    out_opt(summary);
    seeded(summary);

    auto* adf = app.add_subcommand("adf", "Augmented Dickey-Fuller test");
    csv_arg(adf);
    column_opt(adf);
    adf->add_option("--max-lag", o.max_lag, "Override the number of lagged differences");
    out_opt(adf);
    seeded(adf);

    auto* decompose = app.add_subcommand("decompose", "Moving-average trend and residual");
    csv_arg(decompose);
    column_opt(decompose);
    decompose->add_option("--window", o.window, "Odd window length")->required();
    out_opt(decompose);
    seeded(decompose);

    auto* fit = app.add_subcommand("fit-arima", "Fit an ARIMA model by conditional sum of squares");
    csv_arg(fit);
    column_opt(fit);
    auto* order_opt = fit->add_option("--order", o.order, "p,d,q");
    auto* auto_flag = fit->add_flag("--auto", o.auto_order, "Select the order by ADF gate and AIC");
    order_opt->excludes(auto_flag);
    fit->add_option("--p-max", o.p_max, "Largest AR order for --auto");
    fit->add_option("--q-max", o.q_max, "Largest MA order for --auto");
    fit->add_option("--out", o.out, "Write the model JSON here");
    seeded(fit);

    auto* rnn = app.add_subcommand("train-rnn", "Train an LSTM or GRU and report rolling one-step metrics");
    csv_arg(rnn);
    column_opt(rnn);
    rnn->add_option("--cell", o.cell, "lstm or gru")->required();
    rnn->add_option("--hidden", o.hidden, "Hidden units");
    rnn->add_option("--window", o.window_length, "Input window length");
    rnn->add_option("--train-fraction", o.train_fraction, "Leading fraction used for training");
    rnn->add_option("--epochs", o.train.epochs, "Training epochs");
    rnn->add_option("--batch-size", o.train.batch_size, "Mini-batch size");
    rnn->add_option("--learning-rate", o.train.learning_rate, "Adam step size");
    rnn->add_option("--beta1", o.train.beta1, "Adam first-moment decay");
    rnn->add_option("--beta2", o.train.beta2, "Adam second-moment decay");
    rnn->add_option("--eps-adam", o.train.eps_adam, "Adam epsilon");
    rnn->add_option("--grad-clip", o.train.grad_clip_norm, "Global gradient-norm clip (0 disables)");
    rnn->add_option("--weights-out", o.weights_out, "Write trained weights as JSON");
    seeded(rnn)->default_val(7);
    o.seed = 7;

    auto* bench = app.add_subcommand("benchmark", "Run the models x horizons benchmark");
    bench->add_option("--config", o.config, "INI configuration file")->required();
    bench->add_option("--out-dir", o.out_dir, "Override the configured output directory");
    auto* bench_seed = seeded(bench);

    auto* report = app.add_subcommand("report", "Render a report.json as summary CSV or JSON");
    report->add_option("report", o.csv, "report.json")->required();
    report->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    out_opt(report);
    seeded(report);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInput;
    }

    try {
        if (*ingest) return cmd_ingest(o);
        if (*fetch) return cmd_fetch(o);
        if (*summary) return cmd_summary(o);
        if (*adf) return cmd_adf(o);
        if (*decompose) return cmd_decompose(o);
        if (*fit) {
            if (o.order.empty() && !o.auto_order) throw hb::InputError("fit-arima: give --order p,d,q or --auto");
            return cmd_fit_arima(o);
        }
        if (*rnn) return cmd_train_rnn(o);
        if (*bench) return cmd_benchmark(o, bench_seed->count() > 0);
        if (*report) return cmd_report(o);
    } catch (const hb::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }
    return kExitInput;
}

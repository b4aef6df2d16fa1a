#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <openssl/evp.h>

#include "horizonbench/arma.hpp"
#include "horizonbench/config.hpp"
#include "horizonbench/errors.hpp"
#include "horizonbench/fetch.hpp"
#include "horizonbench/io.hpp"
#include "horizonbench/market_data.hpp"
#include "horizonbench/metrics.hpp"
#include "horizonbench/preprocess.hpp"
#include "horizonbench/recurrent.hpp"
#include "horizonbench/stationarity.hpp"

namespace horizonbench {

struct PredictionTrace {
    std::vector<std::string> dates;  // ISO dates, or row indices for undated data
    std::vector<double> actual;
    std::vector<double> predicted;
};

/// One (model, horizon) cell. A failed cell keeps `error` and nothing else.
struct CellResult {
    ModelKind model = ModelKind::Arma;
    Horizon horizon = Horizon::Short;
    std::optional<std::string> error;
    MetricReport metrics;
    double seconds = 0.0;
    Json detail = Json::object();
    PredictionTrace trace;

    bool ok() const noexcept { return !error.has_value(); }
    std::string trace_file() const {
        return "trace_" + std::string(model_name(model)) + "_" + std::string(horizon_name(horizon)) + ".csv";
    }
};

struct BenchmarkReport {
    BenchConfig config;
    std::string dataset_sha256;
    std::optional<AdfResult> adf;
    std::optional<std::string> adf_error;
    std::vector<CellResult> cells;

    bool has_failures() const {
        return std::any_of(cells.begin(), cells.end(), [](const CellResult& c) { return !c.ok(); });
    }
};

// ---------------------------------------------------------------------------
// Helpers

inline std::string sha256_hex(std::string_view bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw Error("sha256 failed");
    std::ostringstream out;
    for (unsigned int i = 0; i < len; ++i) out << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
    return out.str();
}

/// Stable per-cell seed: FNV-1a over "model/horizon" folded with the global
/// seed and finished with a splitmix64 round. Independent of cell order.
inline std::uint64_t derive_seed(std::uint64_t global, ModelKind model, Horizon horizon) {
    std::uint64_t h = 0xcbf29ce484222325ULL ^ global;
    auto mix = [&](std::string_view s) {
        for (unsigned char ch : s) {
            h ^= ch;
            h *= 0x100000001b3ULL;
        }
    };
    mix(model_name(model));
    mix("/");
    mix(horizon_name(horizon));
    h += 0x9e3779b97f4a7c15ULL;
    h = (h ^ (h >> 30)) * 0xbf58476d1ce4e5b9ULL;
    h = (h ^ (h >> 27)) * 0x94d049bb133111ebULL;
    return h ^ (h >> 31);
}

inline TimeSeriesTable load_table(const BenchConfig& cfg) {
    if (!cfg.data_path.empty()) {
        std::ifstream in(cfg.data_path, std::ios::binary);
        if (!in) throw InputError("cannot open data file " + cfg.data_path);
        std::stringstream buf;
        buf << in.rdbuf();
        return parse_ohlcv_csv(buf.str(), cfg.symbol);
    }
    FetchEndpoint ep;
    ep.base_url = cfg.endpoint.empty() ? data_url_from_env() : cfg.endpoint;
    ep.symbol = cfg.symbol;
    if (!cfg.start || !cfg.end) throw ConfigError("config keys 'start' and 'end' are required when fetching");
    ep.start = *cfg.start;
    ep.end = *cfg.end;
    return fetch_ohlcv(ep);
}

namespace detail {

/// Predicts slice[first..] one step at a time. The predictor only ever sees
/// the prefix of observations strictly before the target index.
struct RollingPredictor {
    const Series& slice;
    std::size_t first_test;
    bool audit;

    std::vector<double> run(const std::function<double(std::span<const double>)>& predict_next) const {
        std::vector<double> out;
        out.reserve(slice.size() - first_test);
        for (std::size_t t = first_test; t < slice.size(); ++t) {
            std::span<const double> history(slice.values.data(), t);
            if (audit) {
                if (history.size() != t || (slice.has_dates() && !(slice.dates[t - 1] < slice.dates[t])))
                    throw Error("leakage audit failed at index " + std::to_string(t));
            }
            out.push_back(predict_next(history));
        }
        return out;
    }
};

inline Json metrics_json(const MetricReport& m) {
    Json j;
    j["r2"] = m.r2;
    j["rmse"] = m.rmse;
    j["mse"] = m.mse;
    j["mae"] = m.mae;
    j["mape_percent"] = m.mape_percent ? Json(*m.mape_percent) : Json(nullptr);
    return j;
}

inline Json arima_detail(const ArimaModel& model, const OrderSelection& sel) {
    Json j = arima_to_json(model);
    j["css"] = model.css;
    j["converged"] = model.converged;
    j["iterations"] = model.iterations;
    j["stationarity_fallback"] = sel.stationarity_fallback;
    j["adf_gate_statistics"] = sel.adf_statistics;
    j["selection_aic"] = sel.aic;
    return j;
}

inline void run_statistical(CellResult& cell, const BenchConfig& cfg, const Series& slice, std::size_t n_train) {
    const std::span<const double> train(slice.values.data(), n_train);
    const OrderGrid& grid = cell.model == ModelKind::Arma ? cfg.arma : cfg.arima;
    OrderSearch search{grid.p_max, grid.q_max, cell.model == ModelKind::Arma ? std::vector<int>{0} : grid.d_choices};
    const auto sel = select_order(train, search);
    const auto model = fit_arima(train, sel.p, sel.d, sel.q);
    cell.trace.predicted = RollingPredictor{slice, n_train, cfg.audit_leakage}.run(
        [&](std::span<const double> history) { return forecast(model, history, 1).front(); });
    cell.detail = arima_detail(model, sel);
}

template <RecurrentCell Cell>
void run_recurrent(CellResult& cell, const BenchConfig& cfg, const Series& slice, std::size_t n_train,
                   std::uint64_t seed) {
    const auto& rc = cfg.recurrent(cell.model);
    const std::size_t w = cfg.window_length;
    if (n_train <= w)
        throw InputError("training part has " + std::to_string(n_train) + " rows, window_length is " +
                         std::to_string(w));
    const auto scaler = fit_minmax(std::span<const double>(slice.values.data(), n_train));
    const auto scaled = scaler.transform(slice.values);
    const auto data = make_windows(std::span<const double>(scaled.data(), n_train), w);

    TrainConfig tc = rc.train;
    tc.seed = seed;
    auto result = train(RecurrentNetwork<Cell>::zeros(rc.hidden, 1), data, tc);
    const auto& net = result.network;

    cell.trace.predicted = RollingPredictor{slice, n_train, cfg.audit_leakage}.run(
        [&](std::span<const double> history) {
            std::vector<double> window(w);
            for (std::size_t k = 0; k < w; ++k) window[k] = scaler.transform(history[history.size() - w + k]);
            return scaler.inverse(forward(net, window).prediction);
        });

    Json j;
    j["cell"] = std::string(cell_name(Cell::kind));
    j["hidden"] = rc.hidden;
    j["window_length"] = w;
    j["epochs"] = tc.epochs;
    j["batch_size"] = tc.batch_size;
    j["learning_rate"] = tc.learning_rate;
    j["grad_clip_norm"] = tc.grad_clip_norm;
    j["seed"] = seed;
    j["adam_steps"] = result.adam_steps;
    j["final_train_loss_scaled"] = result.loss_history.back();
    j["scaler"] = {{"lo", scaler.lo}, {"hi", scaler.hi}};
    cell.detail = std::move(j);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Orchestration

/// Runs every (model, horizon) cell in configuration order. Cell failures are
/// recorded and the run continues; metrics are always in price units.
inline BenchmarkReport run_benchmark(const BenchConfig& cfg, const TimeSeriesTable& table) {
    BenchmarkReport report;
    report.config = cfg;
    report.dataset_sha256 = sha256_hex(to_csv(table));
    const Series series = select_series(table, cfg.column);
    try {
        report.adf = adf_test(series.values);
    } catch (const Error& e) {
        report.adf_error = e.what();
    }

    for (ModelKind model : cfg.models) {
        for (Horizon horizon : cfg.horizons) {
            CellResult cell;
            cell.model = model;
            cell.horizon = horizon;
            const auto started = std::chrono::steady_clock::now();
            try {
                const auto sizes = split_sizes(series.size(), horizon, cfg.train_fraction);
                const Series slice = series.slice(series.size() - sizes.slice, sizes.slice);
                const std::uint64_t seed = derive_seed(cfg.seed, model, horizon);
                switch (model) {
                    case ModelKind::Arma:
                    case ModelKind::Arima: detail::run_statistical(cell, cfg, slice, sizes.train); break;
                    case ModelKind::Lstm: detail::run_recurrent<Lstm>(cell, cfg, slice, sizes.train, seed); break;
                    case ModelKind::Gru: detail::run_recurrent<Gru>(cell, cfg, slice, sizes.train, seed); break;
                }
                for (std::size_t t = sizes.train; t < slice.size(); ++t) {
                    cell.trace.actual.push_back(slice.values[t]);
                    cell.trace.dates.push_back(slice.has_dates() ? format_date(slice.dates[t]) : std::to_string(t));
                }
                cell.metrics = evaluate(cell.trace.predicted, cell.trace.actual);
                for (double v : cell.trace.predicted)
                    if (!std::isfinite(v)) throw NumericalError("non-finite prediction");
                if (cfg.audit_leakage) cell.detail["leakage_audit"] = "passed";
                cell.detail["train_rows"] = sizes.train;
                cell.detail["test_rows"] = sizes.test;
            } catch (const std::exception& e) {
                cell.error = e.what();
                cell.detail = Json::object();
                cell.trace = {};
            }
            cell.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
            report.cells.push_back(std::move(cell));
        }
    }
    return report;
}

// ---------------------------------------------------------------------------
// Serialisation

inline Json config_to_json(const BenchConfig& c) {
    Json j;
    j["data"] = c.data_path;
    j["endpoint"] = c.endpoint;
    j["symbol"] = c.symbol;
    j["column"] = std::string(column_name(c.column));
    Json models = Json::array();
    for (auto m : c.models) models.push_back(std::string(model_name(m)));
    j["models"] = models;
    Json horizons = Json::array();
    for (auto h : c.horizons) horizons.push_back(std::string(horizon_name(h)));
    j["horizons"] = horizons;
    j["train_fraction"] = c.train_fraction;
    j["window_length"] = c.window_length;
    j["seed"] = c.seed;
    j["arma"] = {{"p_max", c.arma.p_max}, {"q_max", c.arma.q_max}};
    j["arima"] = {{"p_max", c.arima.p_max}, {"q_max", c.arima.q_max}, {"d_choices", c.arima.d_choices}};
    for (auto [name, rc] : {std::pair{"lstm", &c.lstm}, std::pair{"gru", &c.gru}}) {
        j[name] = {{"hidden", rc->hidden},
                   {"epochs", rc->train.epochs},
                   {"batch_size", rc->train.batch_size},
                   {"learning_rate", rc->train.learning_rate},
                   {"beta1", rc->train.beta1},
                   {"beta2", rc->train.beta2},
                   {"eps_adam", rc->train.eps_adam},
                   {"grad_clip_norm", rc->train.grad_clip_norm}};
    }
    return j;
}

/// The report.json document. `include_timing = false` drops the wall-clock
/// fields, leaving a document that is a pure function of (config, data).
inline Json report_to_json(const BenchmarkReport& r, bool include_timing = true, bool with_trace_files = true) {
    Json meta;
    meta["config"] = config_to_json(r.config);
    meta["dataset_sha256"] = r.dataset_sha256;
    if (r.adf) {
        meta["adf"] = {{"statistic", r.adf->statistic},
                       {"p_value", r.adf->p_value},
                       {"lags", r.adf->lags_used},
                       {"crit_1pct", r.adf->crit_1pct},
                       {"crit_5pct", r.adf->crit_5pct},
                       {"crit_10pct", r.adf->crit_10pct},
                       {"p_value_method", "interpolated between tabulated quantiles; coarse"}};
    } else {
        meta["adf"] = nullptr;
        meta["adf_error"] = r.adf_error.value_or("");
    }
    meta["metrics_units"] = "price";

    Json cells = Json::array();
    for (const auto& c : r.cells) {
        Json j;
        j["model"] = std::string(model_name(c.model));
        j["horizon"] = std::string(horizon_name(c.horizon));
        j["status"] = c.ok() ? "ok" : "failed";
        if (c.ok()) {
            j["metrics"] = detail::metrics_json(c.metrics);
            j["n"] = c.metrics.n;
        } else {
            j["metrics"] = nullptr;
            j["error"] = *c.error;
        }
        if (include_timing) j["seconds"] = c.seconds;
        j["detail"] = c.detail;
        j["trace_file"] = (c.ok() && with_trace_files) ? Json(c.trace_file()) : Json(nullptr);
        cells.push_back(std::move(j));
    }
    Json doc;
    doc["meta"] = std::move(meta);
    doc["cells"] = std::move(cells);
    return doc;
}

/// Removes wall-clock fields from a report document.
inline Json strip_timing(Json doc) {
    if (doc.contains("cells"))
        for (auto& c : doc["cells"]) c.erase("seconds");
    return doc;
}

inline constexpr const char* kSummaryHeader = "model,horizon,r2,rmse,mse,mae,mape";

namespace detail {

inline std::string number_or_empty(const Json& v) {
    return v.is_number() ? format_double(v.get<double>()) : std::string();
}

}  // namespace detail

/// summary.csv from a report document; failed cells get empty metric fields.
inline std::string summary_csv(const Json& report) {
    std::string out = std::string(kSummaryHeader) + "\n";
    for (const auto& c : report.at("cells")) {
        out += c.at("model").get<std::string>() + "," + c.at("horizon").get<std::string>();
        const auto& m = c.at("metrics");
        for (const char* key : {"r2", "rmse", "mse", "mae", "mape_percent"}) {
            out += ",";
            if (m.is_object()) out += detail::number_or_empty(m.at(key));
        }
        out += "\n";
    }
    return out;
}

inline std::string trace_csv(const PredictionTrace& t) {
    std::string out = "date,actual,predicted\n";
    for (std::size_t i = 0; i < t.actual.size(); ++i)
        out += t.dates[i] + "," + format_double(t.actual[i]) + "," + format_double(t.predicted[i]) + "\n";
    return out;
}

/// Writes report.json ("json"), summary.csv and one trace file per
/// successful cell ("csv") into `out_dir`. Returns the written paths.
inline std::vector<std::filesystem::path> emit_report(const BenchmarkReport& report,
                                                      const std::vector<std::string>& formats,
                                                      const std::filesystem::path& out_dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw Error("cannot create output directory " + out_dir.string() + ": " + ec.message());
    const bool json = std::find(formats.begin(), formats.end(), "json") != formats.end();
    const bool csv = std::find(formats.begin(), formats.end(), "csv") != formats.end();

    std::vector<fs::path> written;
    auto write = [&](const fs::path& path, const std::string& content) {
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write " + path.string());
        out << content;
        if (!out) throw Error("write failed for " + path.string());
        written.push_back(path);
    };
    const Json doc = report_to_json(report, true, csv);
    if (json) write(out_dir / "report.json", doc.dump(2) + "\n");
    if (csv) {
        write(out_dir / "summary.csv", summary_csv(doc));
        for (const auto& c : report.cells)
            if (c.ok()) write(out_dir / c.trace_file(), trace_csv(c.trace));
    }
    return written;
}

}  // namespace horizonbench

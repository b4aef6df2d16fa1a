#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "horizonbench/arma.hpp"
#include "horizonbench/errors.hpp"
#include "horizonbench/market_data.hpp"
#include "horizonbench/preprocess.hpp"
#include "horizonbench/recurrent.hpp"

namespace horizonbench {

enum class ModelKind { Arma, Arima, Lstm, Gru };

inline constexpr std::string_view model_name(ModelKind m) {
    switch (m) {
        case ModelKind::Arma: return "arma";
        case ModelKind::Arima: return "arima";
        case ModelKind::Lstm: return "lstm";
        case ModelKind::Gru: return "gru";
    }
    return "?";
}

inline ModelKind parse_model(std::string_view name) {
    auto key = detail::lower(trim(name));
    for (ModelKind m : {ModelKind::Arma, ModelKind::Arima, ModelKind::Lstm, ModelKind::Gru})
        if (key == model_name(m)) return m;
    throw InputError("unknown model '" + std::string(name) + "'");
}

struct OrderGrid {
    int p_max = 3;
    int q_max = 3;
    std::vector<int> d_choices{0, 1};

    bool operator==(const OrderGrid&) const = default;
};

struct RecurrentConfig {
    int hidden = 64;
    TrainConfig train{};

    bool operator==(const RecurrentConfig&) const = default;
};

/// Everything a benchmark run needs. Written and read as INI-style text:
///
///     # top-level keys
///     data = prices.csv            # or: endpoint/symbol/start/end
///     column = Close
///     models = arma, arima, lstm, gru
///     horizons = short, medium, long
///     train_fraction = 0.8
///     window_length = 30
///     seed = 1                     # required
///     output_dir = out
///     formats = json, csv
///     audit_leakage = false
///
///     [arma]   p_max, q_max
///     [arima]  p_max, q_max, d_choices
///     [lstm]   hidden, epochs, batch_size, learning_rate, beta1, beta2,
///     [gru]    eps_adam, grad_clip_norm
///
/// Unknown keys and sections are rejected.
struct BenchConfig {
    std::string data_path;
    std::string endpoint;
    std::string symbol;
    std::optional<Date> start;
    std::optional<Date> end;
    Column column = Column::Close;
    std::vector<ModelKind> models;
    std::vector<Horizon> horizons;
    double train_fraction = 0.8;
    std::size_t window_length = 30;
    std::uint64_t seed = 0;
    std::string output_dir = "horizonbench-out";
    std::vector<std::string> formats{"json", "csv"};
    bool audit_leakage = false;
    OrderGrid arma{3, 3, {0}};
    OrderGrid arima{3, 3, {0, 1}};
    RecurrentConfig lstm{};
    RecurrentConfig gru{};

    bool operator==(const BenchConfig&) const = default;

    const RecurrentConfig& recurrent(ModelKind m) const { return m == ModelKind::Gru ? gru : lstm; }
};

namespace detail {

inline std::vector<std::string> split_list(std::string_view text) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto pos = text.find(',', start);
        if (pos == std::string_view::npos) pos = text.size();
        auto item = trim(text.substr(start, pos - start));
        if (!item.empty()) out.emplace_back(item);
        start = pos + 1;
    }
    return out;
}

template <class T, class F>
std::string join(const std::vector<T>& items, F&& fmt) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out += ", ";
        out += fmt(items[i]);
    }
    return out;
}

class ConfigReader {
public:
    explicit ConfigReader(std::string section) : section_(std::move(section)) {}

    std::string path(std::string_view key) const {
        return section_.empty() ? std::string(key) : section_ + "." + std::string(key);
    }

    [[noreturn]] void fail(std::string_view key, const std::string& why) const {
        throw ConfigError("config key '" + path(key) + "': " + why);
    }

    template <class T>
    T integer(std::string_view key, const std::string& text, T min) const {
        auto v = parse_integer<T>(text);
        if (!v) fail(key, "expected an integer, got '" + text + "'");
        if (*v < min) fail(key, "must be at least " + std::to_string(min));
        return *v;
    }

    double real(std::string_view key, const std::string& text) const {
        auto v = parse_double(text);
        if (!v || !std::isfinite(*v)) fail(key, "expected a number, got '" + text + "'");
        return *v;
    }

    bool boolean(std::string_view key, const std::string& text) const {
        auto t = lower(trim(text));
        if (t == "true" || t == "yes" || t == "1") return true;
        if (t == "false" || t == "no" || t == "0") return false;
        fail(key, "expected true or false, got '" + text + "'");
    }

private:
    std::string section_;
};

inline void read_order_grid(const boost::property_tree::ptree& tree, const std::string& section, OrderGrid& grid,
                            bool allow_d) {
    ConfigReader r(section);
    for (const auto& [key, node] : tree) {
        const auto& v = node.data();
        if (key == "p_max") {
            grid.p_max = r.integer<int>(key, v, 0);
        } else if (key == "q_max") {
            grid.q_max = r.integer<int>(key, v, 0);
        } else if (key == "d_choices" && allow_d) {
            grid.d_choices.clear();
            for (const auto& item : split_list(v)) grid.d_choices.push_back(r.integer<int>(key, item, 0));
            if (grid.d_choices.empty()) r.fail(key, "must list at least one order");
        } else {
            r.fail(key, "unknown key");
        }
    }
}

inline void read_recurrent(const boost::property_tree::ptree& tree, const std::string& section, RecurrentConfig& rc) {
    ConfigReader r(section);
    for (const auto& [key, node] : tree) {
        const auto& v = node.data();
        if (key == "hidden") rc.hidden = r.integer<int>(key, v, 1);
        else if (key == "epochs") rc.train.epochs = r.integer<int>(key, v, 1);
        else if (key == "batch_size") rc.train.batch_size = r.integer<std::size_t>(key, v, 1);
        else if (key == "learning_rate") rc.train.learning_rate = r.real(key, v);
        else if (key == "beta1") rc.train.beta1 = r.real(key, v);
        else if (key == "beta2") rc.train.beta2 = r.real(key, v);
        else if (key == "eps_adam") rc.train.eps_adam = r.real(key, v);
        else if (key == "grad_clip_norm") rc.train.grad_clip_norm = r.real(key, v);
        else r.fail(key, "unknown key");
    }
    try {
        rc.train.validate();
    } catch (const InputError& e) {
        throw ConfigError("config section [" + section + "]: " + e.what());
    }
}

}  // namespace detail

/// Parses configuration text. Relative data paths are resolved against
/// `base_dir` when it is non-empty.
inline BenchConfig parse_config(std::string_view text, const std::filesystem::path& base_dir = {}) {
    namespace pt = boost::property_tree;
    pt::ptree tree;
    try {
        std::istringstream in{std::string(text)};
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError("config line " + std::to_string(e.line()) + ": " + e.message());
    }

    BenchConfig cfg;
    cfg.models.clear();
    cfg.horizons.clear();
    bool have_seed = false;
    detail::ConfigReader r("");
    for (const auto& [key, node] : tree) {
        const auto& v = node.data();
        if (!node.empty()) {
            if (key == "arma") detail::read_order_grid(node, key, cfg.arma, false);
            else if (key == "arima") detail::read_order_grid(node, key, cfg.arima, true);
            else if (key == "lstm") detail::read_recurrent(node, key, cfg.lstm);
            else if (key == "gru") detail::read_recurrent(node, key, cfg.gru);
            else throw ConfigError("config section [" + key + "]: unknown section");
            continue;
        }
        try {
            if (key == "data") {
                std::filesystem::path p(v);
                if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
                cfg.data_path = p.lexically_normal().string();
            } else if (key == "endpoint") {
                cfg.endpoint = v;
            } else if (key == "symbol") {
                cfg.symbol = v;
            } else if (key == "start" || key == "end") {
                auto d = parse_date(v);
                if (!d) r.fail(key, "expected YYYY-MM-DD, got '" + v + "'");
                (key == "start" ? cfg.start : cfg.end) = d;
            } else if (key == "column") {
                cfg.column = parse_column(v);
            } else if (key == "models") {
                for (const auto& m : detail::split_list(v)) cfg.models.push_back(parse_model(m));
            } else if (key == "horizons") {
                for (const auto& h : detail::split_list(v)) cfg.horizons.push_back(parse_horizon(h));
            } else if (key == "train_fraction") {
                cfg.train_fraction = r.real(key, v);
                if (!(cfg.train_fraction > 0.0 && cfg.train_fraction < 1.0)) r.fail(key, "must lie in (0, 1)");
            } else if (key == "window_length") {
                cfg.window_length = r.integer<std::size_t>(key, v, 1);
            } else if (key == "seed") {
                cfg.seed = r.integer<std::uint64_t>(key, v, 0);
                have_seed = true;
            } else if (key == "output_dir") {
                cfg.output_dir = v;
            } else if (key == "formats") {
                cfg.formats = detail::split_list(v);
                for (const auto& f : cfg.formats)
                    if (f != "json" && f != "csv") r.fail(key, "unknown format '" + f + "'");
            } else if (key == "audit_leakage") {
                cfg.audit_leakage = r.boolean(key, v);
            } else {
                r.fail(key, "unknown key");
            }
        } catch (const ConfigError&) {
            throw;
        } catch (const InputError& e) {
            r.fail(key, e.what());
        }
    }
    if (!have_seed) throw ConfigError("config key 'seed': required");
    if (cfg.models.empty()) throw ConfigError("config key 'models': at least one model is required");
    if (cfg.horizons.empty()) throw ConfigError("config key 'horizons': at least one horizon is required");
    if (cfg.data_path.empty() && cfg.endpoint.empty() && cfg.symbol.empty())
        throw ConfigError("config key 'data': a data file or an endpoint symbol is required");
    return cfg;
}

inline BenchConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), path.parent_path());
}

/// Renders the effective configuration (defaults included) in the same
/// format `parse_config` reads.
inline std::string to_config_text(const BenchConfig& c) {
    std::ostringstream out;
    if (!c.data_path.empty()) out << "data = " << c.data_path << "\n";
    if (!c.endpoint.empty()) out << "endpoint = " << c.endpoint << "\n";
    if (!c.symbol.empty()) out << "symbol = " << c.symbol << "\n";
    if (c.start) out << "start = " << format_date(*c.start) << "\n";
    if (c.end) out << "end = " << format_date(*c.end) << "\n";
    out << "column = " << column_name(c.column) << "\n";
    out << "models = " << detail::join(c.models, [](ModelKind m) { return std::string(model_name(m)); }) << "\n";
    out << "horizons = " << detail::join(c.horizons, [](Horizon h) { return std::string(horizon_name(h)); }) << "\n";
    out << "train_fraction = " << format_double(c.train_fraction) << "\n";
    out << "window_length = " << c.window_length << "\n";
    out << "seed = " << c.seed << "\n";
    out << "output_dir = " << c.output_dir << "\n";
    out << "formats = " << detail::join(c.formats, [](const std::string& f) { return f; }) << "\n";
    out << "audit_leakage = " << (c.audit_leakage ? "true" : "false") << "\n";
    auto grid = [&](const char* name, const OrderGrid& g, bool with_d) {
        out << "\n[" << name << "]\np_max = " << g.p_max << "\nq_max = " << g.q_max << "\n";
        if (with_d) out << "d_choices = " << detail::join(g.d_choices, [](int d) { return std::to_string(d); }) << "\n";
    };
    grid("arma", c.arma, false);
    grid("arima", c.arima, true);
    auto rnn = [&](const char* name, const RecurrentConfig& r) {
        out << "\n[" << name << "]\n"
            << "hidden = " << r.hidden << "\n"
            << "epochs = " << r.train.epochs << "\n"
            << "batch_size = " << r.train.batch_size << "\n"
            << "learning_rate = " << format_double(r.train.learning_rate) << "\n"
            << "beta1 = " << format_double(r.train.beta1) << "\n"
            << "beta2 = " << format_double(r.train.beta2) << "\n"
            << "eps_adam = " << format_double(r.train.eps_adam) << "\n"
            << "grad_clip_norm = " << format_double(r.train.grad_clip_norm) << "\n";
    };
    rnn("lstm", c.lstm);
    rnn("gru", c.gru);
    return out.str();
}

}  // namespace horizonbench

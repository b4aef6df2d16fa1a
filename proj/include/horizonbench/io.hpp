#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "horizonbench/arma.hpp"
#include "horizonbench/errors.hpp"
#include "horizonbench/recurrent.hpp"

namespace horizonbench {

using Json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// ARIMA models: {p, d, q, ar[], ma[], intercept, aic, seeds[]}

inline Json arima_to_json(const ArimaModel& m) {
    Json j;
    j["p"] = m.p();
    j["d"] = m.d;
    j["q"] = m.q();
    j["ar"] = m.params.ar;
    j["ma"] = m.params.ma;
    j["intercept"] = m.params.intercept;
    j["aic"] = m.aic;
    j["seeds"] = m.seeds;
    return j;
}

inline ArimaModel arima_from_json(const Json& j) {
    try {
        ArimaModel m;
        m.params.ar = j.at("ar").get<std::vector<double>>();
        m.params.ma = j.at("ma").get<std::vector<double>>();
        m.params.intercept = j.at("intercept").get<double>();
        m.d = j.at("d").get<int>();
        m.aic = j.at("aic").get<double>();
        m.seeds = j.at("seeds").get<std::vector<double>>();
        if (j.at("p").get<int>() != m.p() || j.at("q").get<int>() != m.q())
            throw InputError("ARIMA model: p/q disagree with coefficient counts");
        if (m.seeds.size() != static_cast<std::size_t>(m.d))
            throw InputError("ARIMA model: seed count disagrees with d");
        return m;
    } catch (const Json::exception& e) {
        throw InputError(std::string("ARIMA model: ") + e.what());
    }
}

// ---------------------------------------------------------------------------
// Recurrent weights
//
// {"cell": "lstm"|"gru", "hidden_size": H, "input_size": I, "seed": S,
//  "tensors": [{"name", "rows", "cols", "data": [column-major values]}]}
//
// Tensors appear in the fixed visiting order of for_each_tensor: the cell
// tensors (input weights, recurrent weights, biases) then head_w, head_b.

template <RecurrentCell Cell>
Json weights_to_json(const RecurrentNetwork<Cell>& net) {
    Json j;
    j["cell"] = std::string(cell_name(Cell::kind));
    j["hidden_size"] = net.hidden_size();
    j["input_size"] = net.input_size();
    j["seed"] = net.seed;
    Json tensors = Json::array();
    for_each_tensor(
        [&](std::string_view name, const auto& w) {
            Json t;
            t["name"] = std::string(name);
            t["rows"] = w.rows();
            t["cols"] = w.cols();
            t["data"] = std::vector<double>(w.data(), w.data() + w.size());
            tensors.push_back(std::move(t));
        },
        net.weights);
    j["tensors"] = std::move(tensors);
    return j;
}

template <RecurrentCell Cell>
RecurrentNetwork<Cell> weights_from_json(const Json& j) {
    try {
        if (j.at("cell").get<std::string>() != cell_name(Cell::kind))
            throw InputError("weights: cell kind is '" + j.at("cell").get<std::string>() + "'");
        auto net = RecurrentNetwork<Cell>::zeros(j.at("hidden_size").get<Eigen::Index>(),
                                                 j.at("input_size").get<Eigen::Index>());
        net.seed = j.at("seed").get<std::uint64_t>();
        const auto& tensors = j.at("tensors");
        std::size_t k = 0;
        for_each_tensor(
            [&](std::string_view name, auto& w) {
                if (k >= tensors.size()) throw InputError("weights: missing tensor " + std::string(name));
                const auto& t = tensors[k++];
                if (t.at("name").get<std::string>() != name)
                    throw InputError("weights: expected tensor " + std::string(name));
                if (t.at("rows").get<Eigen::Index>() != w.rows() || t.at("cols").get<Eigen::Index>() != w.cols())
                    throw InputError("weights: shape mismatch for " + std::string(name));
                const auto data = t.at("data").get<std::vector<double>>();
                if (static_cast<Eigen::Index>(data.size()) != w.size())
                    throw InputError("weights: size mismatch for " + std::string(name));
                std::copy(data.begin(), data.end(), w.data());
            },
            net.weights);
        if (k != tensors.size()) throw InputError("weights: unexpected extra tensors");
        return net;
    } catch (const Json::exception& e) {
        throw InputError(std::string("weights: ") + e.what());
    }
}

}  // namespace horizonbench

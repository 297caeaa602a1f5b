#pragma once

// Internal: shared JSON (de)serialization of LSTM models. Not installed.

#include <json.hpp>

#include "json_util.hpp"
#include "prodlex/error.hpp"
#include "prodlex/model_io.hpp"
#include "prodlex/nn.hpp"

namespace prodlex::io {

inline nlohmann::json hyper_to_json(const nn::Hyperparams& h) {
    return {{"hidden_units", h.hidden_units},
            {"num_layers", h.num_layers},
            {"dropout_p", h.dropout_p},
            {"learning_rate", h.learning_rate},
            {"epochs", h.epochs},
            {"weight_other", h.weight_other},
            {"weight_product", h.weight_product},
            {"seed", h.seed}};
}

inline nn::Hyperparams hyper_from_json(const nlohmann::json& j) {
    nn::Hyperparams h;
    h.hidden_units = j.at("hidden_units").get<int>();
    h.num_layers = j.at("num_layers").get<int>();
    h.dropout_p = j.at("dropout_p").get<double>();
    h.learning_rate = j.at("learning_rate").get<double>();
    h.epochs = j.at("epochs").get<int>();
    h.weight_other = j.at("weight_other").get<double>();
    h.weight_product = j.at("weight_product").get<double>();
    h.seed = j.at("seed").get<std::uint64_t>();
    h.validate();
    return h;
}

inline nlohmann::json lstm_to_json(const nn::LstmModel& m) {
    nlohmann::json layers = nlohmann::json::array();
    for (const auto& layer : m.layers) {
        layers.push_back({{"wi", to_json(layer.input.w_in)},
                          {"ui", to_json(layer.input.w_rec)},
                          {"bi", to_json(layer.input.bias)},
                          {"wf", to_json(layer.forget.w_in)},
                          {"uf", to_json(layer.forget.w_rec)},
                          {"bf", to_json(layer.forget.bias)},
                          {"wg", to_json(layer.cell.w_in)},
                          {"ug", to_json(layer.cell.w_rec)},
                          {"bg", to_json(layer.cell.bias)},
                          {"wo", to_json(layer.output.w_in)},
                          {"uo", to_json(layer.output.w_rec)},
                          {"bo", to_json(layer.output.bias)}});
    }
    return {{"hyperparams", hyper_to_json(m.hyper)},
            {"layers", layers},
            {"proj_w", to_json(m.proj_w)},
            {"proj_b", to_json(m.proj_b)}};
}

inline nn::LstmModel lstm_from_json(const nlohmann::json& j) {
    nn::LstmModel m;
    m.hyper = hyper_from_json(j.at("hyperparams"));
    for (const auto& lj : j.at("layers")) {
        nn::LstmLayerParams layer;
        layer.input = {matrix_from_json(lj.at("wi")), matrix_from_json(lj.at("ui")),
                       vector_from_json(lj.at("bi"))};
        layer.forget = {matrix_from_json(lj.at("wf")), matrix_from_json(lj.at("uf")),
                        vector_from_json(lj.at("bf"))};
        layer.cell = {matrix_from_json(lj.at("wg")), matrix_from_json(lj.at("ug")),
                      vector_from_json(lj.at("bg"))};
        layer.output = {matrix_from_json(lj.at("wo")), matrix_from_json(lj.at("uo")),
                        vector_from_json(lj.at("bo"))};
        m.layers.push_back(std::move(layer));
    }
    if (m.layers.empty()) throw Error("model file: LSTM has no layers");
    if (static_cast<int>(m.layers.size()) != m.hyper.num_layers) {
        throw Error("model file: layer count does not match hyperparams");
    }
    m.proj_w = matrix_from_json(j.at("proj_w"));
    m.proj_b = vector_from_json(j.at("proj_b"));
    return m;
}

inline nlohmann::json model_header(const char* model_type, std::uint64_t seed) {
    return {{"format_version", kModelFormatVersion}, {"model_type", model_type}, {"seed", seed}};
}

inline void check_model_header(const nlohmann::json& j, const char* expected_type) {
    if (!j.is_object() || !j.contains("format_version") || !j.contains("model_type")) {
        throw Error("not a model file");
    }
    const int version = j.at("format_version").get<int>();
    if (version != kModelFormatVersion) {
        throw Error("unsupported model format_version " + std::to_string(version));
    }
    const std::string type = j.at("model_type").get<std::string>();
    if (expected_type && type != expected_type) {
        throw Error("model file is of type \"" + type + "\", expected \"" + expected_type + "\"");
    }
}

}  // namespace prodlex::io

#pragma once

// Internal helpers shared by the serialization code. Not installed.

#include <Eigen/Dense>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "prodlex/error.hpp"

namespace prodlex::io {

inline std::string slurp_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open file: " + path);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write file: " + path);
    out << content;
    if (!out) throw Error("write failed: " + path);
}

inline nlohmann::json parse_json_file(const std::string& path) {
    auto text = slurp_file(path);
    nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
    if (j.is_discarded()) throw Error("invalid JSON in " + path);
    return j;
}

inline nlohmann::json to_json(const Eigen::MatrixXd& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline nlohmann::json to_json(const Eigen::VectorXd& v) {
    nlohmann::json arr = nlohmann::json::array();
    for (Eigen::Index k = 0; k < v.size(); ++k) arr.push_back(v[k]);
    return arr;
}

inline Eigen::MatrixXd matrix_from_json(const nlohmann::json& j) {
    if (!j.is_array() || j.empty()) throw Error("model file: expected a matrix");
    const auto rows = j.size();
    const auto cols = j[0].size();
    Eigen::MatrixXd m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
        if (j[r].size() != cols) throw Error("model file: ragged matrix");
        for (std::size_t c = 0; c < cols; ++c) m(r, c) = j[r][c].get<double>();
    }
    return m;
}

inline Eigen::VectorXd vector_from_json(const nlohmann::json& j) {
    if (!j.is_array()) throw Error("model file: expected a vector");
    Eigen::VectorXd v(j.size());
    for (std::size_t k = 0; k < j.size(); ++k) v[k] = j[k].get<double>();
    return v;
}

}  // namespace prodlex::io

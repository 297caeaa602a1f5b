#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "prodlex/nn.hpp"

namespace prodlex::charname {

/// Fixed character inventory: 'a'-'z', '0'-'9', '-', '\'' plus one UNK slot
/// that absorbs everything else surviving normalization.
class CharEncoding {
  public:
    static constexpr int kDim = 39;
    static constexpr int kUnkIndex = kDim - 1;

    /// Index of a normalized character (byte); UNK for anything unknown.
    static int index_of(char c);
    static int index_of_codepoint(char32_t cp);
};

/// One-hot vectors over the 39-slot inventory for every character of the
/// normalized word. Throws when the word normalizes to nothing.
std::vector<Eigen::VectorXd> encode_chars(std::string_view word);

struct CharNamePrediction {
    double probability = 0.0;  // probability the word is a product name
    int label = 0;             // 1 at probability > 0.5
};

/// Per-manufacturer character-level LSTM over product-name style.
class CharNameModel {
  public:
    CharNameModel() = default;
    CharNameModel(nn::LstmModel lstm, std::string manufacturer);

    const nn::LstmModel& lstm() const { return lstm_; }
    const std::string& manufacturer() const { return manufacturer_; }
    bool trained() const { return !lstm_.layers.empty(); }

    CharNamePrediction predict(std::string_view word) const;

    std::string to_json_string() const;
    void save(const std::string& path) const;
    static CharNameModel from_json_string(const std::string& json_text);
    static CharNameModel load(const std::string& path);

  private:
    nn::LstmModel lstm_;
    std::string manufacturer_;
};

/// Trains the two-class model: final hidden state into a two-label
/// log-softmax, per-sample SGD, epoch-shuffled. Duplicate words are removed;
/// fewer than 10 distinct words on either side is an error.
CharNameModel charname_train(const std::vector<std::string>& positives,
                             const std::vector<std::string>& negatives,
                             const nn::Hyperparams& hyper, std::string manufacturer = "");

}  // namespace prodlex::charname

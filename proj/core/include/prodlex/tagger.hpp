#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "prodlex/datasets.hpp"
#include "prodlex/eval.hpp"
#include "prodlex/nn.hpp"

namespace prodlex::tagger {

/// Per-token labels with product probabilities; the three sequences are
/// parallel.
struct TagResult {
    std::vector<std::string> tokens;
    std::vector<int> labels;  // 1 = product
    std::vector<double> product_probability;
};

/// Word-embedding LSTM tagger. Inputs are frozen embedding lookups; tokens
/// missing from the table get the all-zeros vector, which is itself a signal
/// worth learning from.
class TaggerModel {
  public:
    TaggerModel() = default;
    TaggerModel(nn::LstmModel lstm, int embedding_dim, std::string embedding_checksum,
                std::string category);

    const nn::LstmModel& lstm() const { return lstm_; }
    int embedding_dim() const { return embedding_dim_; }
    const std::string& embedding_checksum() const { return embedding_checksum_; }
    const std::string& category() const { return category_; }
    bool trained() const { return !lstm_.layers.empty(); }

    /// normalize -> tokenize -> embed -> forward (dropout off) -> argmax.
    /// An empty sentence yields an empty result.
    TagResult tag(std::string_view sentence, const data::EmbeddingTable& embeddings) const;

    /// Same, over pre-tokenized input (CV evaluation path).
    TagResult tag_tokens(const std::vector<text::Token>& tokens,
                         const data::EmbeddingTable& embeddings) const;

    /// Rejects embedding tables other than the one trained against.
    void check_embeddings(const data::EmbeddingTable& embeddings,
                          const std::string& checksum) const;

    std::string to_json_string() const;
    void save(const std::string& path) const;
    static TaggerModel from_json_string(const std::string& json_text);
    static TaggerModel load(const std::string& path);

  private:
    nn::LstmModel lstm_;
    int embedding_dim_ = 0;
    std::string embedding_checksum_;
    std::string category_;
};

/// Per-sentence SGD with the class-rescaled NLL. Throws "degenerate training
/// set" when no sentence carries a product label.
TaggerModel tagger_train(const std::vector<data::TaggedSentence>& sentences,
                         const data::EmbeddingTable& embeddings, const nn::Hyperparams& hyper,
                         std::string embedding_checksum = "", std::string category = "");

/// Scores of the two constant taggers on a labeled corpus.
struct BaselineReport {
    cv::Metrics all_zero;  // predict `other` everywhere
    cv::Metrics all_one;   // predict `product` everywhere
    double positive_rate = 0.0;
    long long tokens = 0;
};

BaselineReport baseline_scores(const std::vector<data::TaggedSentence>& sentences);

}  // namespace prodlex::tagger

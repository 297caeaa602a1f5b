#include <cmath>

#include <json.hpp>

#include "json_util.hpp"
#include "lstm_json.hpp"
#include "prodlex/desc.hpp"
#include "prodlex/error.hpp"

namespace prodlex::desc {

namespace {

std::vector<std::string> text_tokens(std::string_view raw) {
    return text::tokenize_surfaces(text::normalize(raw));
}

}  // namespace

void NaiveBayesClassifier::fit(const std::vector<data::TrainPair>& pairs) {
    std::vector<std::vector<std::string>> corpus;
    bool has[2] = {false, false};
    for (const auto& pair : pairs) {
        if (pair.label != 0 && pair.label != 1) throw Error("nb_train: labels must be 0 or 1");
        has[pair.label] = true;
        corpus.push_back(text_tokens(pair.text));
    }
    if (!has[0] || !has[1]) throw Error("nb_train: need at least one example per label");

    vocab_ = text::build_vocab(corpus, 1);
    counts_[0].assign(vocab_.size(), 0);
    counts_[1].assign(vocab_.size(), 0);
    total_tokens_ = {0, 0};
    doc_counts_ = {0, 0};
    for (std::size_t d = 0; d < pairs.size(); ++d) {
        const int label = pairs[d].label;
        ++doc_counts_[label];
        for (const auto& tok : corpus[d]) {
            int idx = vocab_.index_of(tok);
            if (idx >= 0) {
                ++counts_[label][idx];
                ++total_tokens_[label];
            }
        }
    }
}

double NaiveBayesClassifier::posterior_description(std::string_view raw) const {
    if (vocab_.size() == 0) throw Error("nb_predict: model not trained");
    const double v = static_cast<double>(vocab_.size());
    const double docs = static_cast<double>(doc_counts_[0] + doc_counts_[1]);
    double log_score[2];
    for (int label = 0; label < 2; ++label) {
        log_score[label] = std::log(static_cast<double>(doc_counts_[label]) / docs);
    }
    for (const auto& tok : text_tokens(raw)) {
        int idx = vocab_.index_of(tok);
        if (idx < 0) continue;  // unseen tokens carry no evidence
        for (int label = 0; label < 2; ++label) {
            const double num = static_cast<double>(counts_[label][idx]) + 1.0;
            const double den = static_cast<double>(total_tokens_[label]) + v;
            log_score[label] += std::log(num / den);
        }
    }
    // Normalize in log space.
    const double m = std::max(log_score[0], log_score[1]);
    const double z = std::exp(log_score[0] - m) + std::exp(log_score[1] - m);
    return std::exp(log_score[1] - m) / z;
}

DescPrediction NaiveBayesClassifier::predict(std::string_view raw) const {
    const double p_desc = posterior_description(raw);
    DescPrediction pred;
    pred.label = p_desc > 0.5 ? 1 : 0;  // exact tie resolves to other
    pred.confidence = pred.label == 1 ? p_desc : 1.0 - p_desc;
    return pred;
}

std::string NaiveBayesClassifier::to_json_string() const {
    nlohmann::json j = io::model_header("nb", seed_);
    j["encoding"] = {{"vocab", vocab_.tokens()}, {"min_count", vocab_.min_count()}};
    j["params"] = {{"counts_other", counts_[0]},
                   {"counts_description", counts_[1]},
                   {"total_other", total_tokens_[0]},
                   {"total_description", total_tokens_[1]},
                   {"docs_other", doc_counts_[0]},
                   {"docs_description", doc_counts_[1]}};
    return j.dump(2);
}

NaiveBayesClassifier NaiveBayesClassifier::from_json_string(const std::string& json_text) {
    auto j = nlohmann::json::parse(json_text);
    io::check_model_header(j, "nb");
    NaiveBayesClassifier nb(j.value("seed", std::uint64_t{1}));
    nb.vocab_ = text::Vocabulary(j.at("encoding").at("vocab").get<std::vector<std::string>>(),
                                 j.at("encoding").value("min_count", 1));
    const auto& params = j.at("params");
    nb.counts_[0] = params.at("counts_other").get<std::vector<long long>>();
    nb.counts_[1] = params.at("counts_description").get<std::vector<long long>>();
    nb.total_tokens_[0] = params.at("total_other").get<long long>();
    nb.total_tokens_[1] = params.at("total_description").get<long long>();
    nb.doc_counts_[0] = params.at("docs_other").get<long long>();
    nb.doc_counts_[1] = params.at("docs_description").get<long long>();
    if (nb.counts_[0].size() != nb.vocab_.size() || nb.counts_[1].size() != nb.vocab_.size()) {
        throw Error("nb model file: count arrays do not match vocabulary");
    }
    return nb;
}

}  // namespace prodlex::desc

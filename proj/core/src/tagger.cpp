#include "prodlex/tagger.hpp"

#include <cmath>
#include <numeric>

#include <json.hpp>

#include "json_util.hpp"
#include "lstm_json.hpp"
#include "prodlex/error.hpp"
#include "prodlex/text.hpp"

namespace prodlex::tagger {

namespace {

constexpr double kClipNorm = 5.0;

std::vector<Eigen::VectorXd> embed_tokens(const std::vector<text::Token>& tokens,
                                          const data::EmbeddingTable& embeddings) {
    std::vector<Eigen::VectorXd> inputs;
    inputs.reserve(tokens.size());
    for (const auto& tok : tokens) inputs.push_back(embeddings.lookup(tok.surface));
    return inputs;
}

}  // namespace

TaggerModel::TaggerModel(nn::LstmModel lstm, int embedding_dim, std::string embedding_checksum,
                         std::string category)
    : lstm_(std::move(lstm)),
      embedding_dim_(embedding_dim),
      embedding_checksum_(std::move(embedding_checksum)),
      category_(std::move(category)) {}

void TaggerModel::check_embeddings(const data::EmbeddingTable& embeddings,
                                   const std::string& checksum) const {
    if (embeddings.dim() != embedding_dim_) {
        throw Error("tagger: embedding dimension " + std::to_string(embeddings.dim()) +
                    " does not match the model's " + std::to_string(embedding_dim_));
    }
    if (!embedding_checksum_.empty() && !checksum.empty() && checksum != embedding_checksum_) {
        throw Error("tagger: embedding file checksum " + checksum +
                    " does not match the model's " + embedding_checksum_);
    }
}

TagResult TaggerModel::tag(std::string_view sentence,
                           const data::EmbeddingTable& embeddings) const {
    return tag_tokens(text::tokenize(text::normalize(sentence)), embeddings);
}

TagResult TaggerModel::tag_tokens(const std::vector<text::Token>& tokens,
                                  const data::EmbeddingTable& embeddings) const {
    if (!trained()) throw Error("tagger_tag: model not trained");
    if (embeddings.dim() != embedding_dim_) {
        throw Error("tagger_tag: embedding dimension mismatch");
    }
    TagResult result;
    if (tokens.empty()) return result;

    auto inputs = embed_tokens(tokens, embeddings);
    auto hs = nn::lstm_forward(lstm_, inputs, false, nullptr, nullptr);
    for (std::size_t t = 0; t < tokens.size(); ++t) {
        const Eigen::VectorXd lp = nn::log_softmax(lstm_.proj_w * hs[t] + lstm_.proj_b);
        result.tokens.push_back(tokens[t].surface);
        result.labels.push_back(lp[1] > lp[0] ? 1 : 0);
        result.product_probability.push_back(std::exp(lp[1]));
    }
    return result;
}

TaggerModel tagger_train(const std::vector<data::TaggedSentence>& sentences,
                         const data::EmbeddingTable& embeddings, const nn::Hyperparams& hyper,
                         std::string embedding_checksum, std::string category) {
    hyper.validate();
    if (sentences.empty()) throw Error("tagger_train: no sentences");
    bool any_product = false;
    for (const auto& s : sentences) {
        if (s.tokens.empty() || s.tokens.size() != s.labels.size()) {
            throw Error("tagger_train: malformed tagged sentence");
        }
        for (int label : s.labels) any_product = any_product || label == 1;
    }
    if (!any_product) throw Error("tagger_train: degenerate training set (no product labels)");

    Rng rng(hyper.seed);
    nn::LstmModel lstm = nn::make_lstm(embeddings.dim(), 2, hyper, rng);
    const Eigen::VectorXd weights = hyper.label_weights();

    std::vector<int> order(sentences.size());
    std::iota(order.begin(), order.end(), 0);
    for (int epoch = 0; epoch < hyper.epochs; ++epoch) {
        rng.shuffle(order);
        double epoch_loss = 0.0;
        for (int s : order) {
            auto inputs = embed_tokens(sentences[s].tokens, embeddings);
            auto result = nn::lstm_loss_and_grads(lstm, inputs, sentences[s].labels, weights,
                                                  nn::HeadMode::PerStep, true, &rng);
            epoch_loss += result.loss;
            nn::sgd_step(lstm, result.grads, hyper.learning_rate, kClipNorm);
        }
        if (!std::isfinite(epoch_loss)) {
            throw Error("tagger_train: training diverged (non-finite epoch loss)");
        }
    }
    return TaggerModel(std::move(lstm), embeddings.dim(), std::move(embedding_checksum),
                       std::move(category));
}

BaselineReport baseline_scores(const std::vector<data::TaggedSentence>& sentences) {
    std::vector<int> gold;
    for (const auto& s : sentences) {
        gold.insert(gold.end(), s.labels.begin(), s.labels.end());
    }
    if (gold.empty()) throw Error("baseline_scores: no tokens");
    BaselineReport report;
    report.tokens = static_cast<long long>(gold.size());
    long long positives = 0;
    for (int g : gold) positives += g == 1;
    report.positive_rate = static_cast<double>(positives) / static_cast<double>(gold.size());
    const std::vector<int> zeros(gold.size(), 0);
    const std::vector<int> ones(gold.size(), 1);
    report.all_zero = cv::compute_metrics(zeros, gold, 1);
    report.all_one = cv::compute_metrics(ones, gold, 1);
    return report;
}

std::string TaggerModel::to_json_string() const {
    nlohmann::json j = io::model_header("tagger", lstm_.hyper.seed);
    j["hyperparams"] = io::hyper_to_json(lstm_.hyper);
    j["encoding"] = {{"embedding_dim", embedding_dim_},
                     {"embedding_checksum", embedding_checksum_}};
    j["category"] = category_;
    j["params"] = {{"lstm", io::lstm_to_json(lstm_)}};
    return j.dump(2);
}

void TaggerModel::save(const std::string& path) const {
    io::write_file(path, to_json_string());
}

TaggerModel TaggerModel::from_json_string(const std::string& json_text) {
    auto j = nlohmann::json::parse(json_text);
    io::check_model_header(j, "tagger");
    TaggerModel model(io::lstm_from_json(j.at("params").at("lstm")),
                      j.at("encoding").at("embedding_dim").get<int>(),
                      j.at("encoding").value("embedding_checksum", std::string{}),
                      j.value("category", std::string{}));
    if (model.lstm_.in_dim() != model.embedding_dim_) {
        throw Error("tagger model file: embedding dim does not match the first layer");
    }
    return model;
}

TaggerModel TaggerModel::load(const std::string& path) {
    return from_json_string(io::slurp_file(path));
}

}  // namespace prodlex::tagger

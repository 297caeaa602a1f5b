#include <cmath>
#include <numeric>

#include <json.hpp>

#include "json_util.hpp"
#include "lstm_json.hpp"
#include "prodlex/desc.hpp"
#include "prodlex/error.hpp"

namespace prodlex::desc {

namespace {

constexpr double kClipNorm = 5.0;

nn::Hyperparams rnn_desc_defaults() {
    nn::Hyperparams h;
    h.hidden_units = 50;
    h.num_layers = 1;
    h.dropout_p = 0.1;
    h.learning_rate = 0.1;
    h.epochs = 50;
    h.weight_other = 1.0;
    h.weight_product = 1.0;
    return h;
}

}  // namespace

RnnDescClassifier::RnnDescClassifier(std::uint64_t seed) : hyper_(rnn_desc_defaults()) {
    hyper_.seed = seed;
}

RnnDescClassifier::RnnDescClassifier(const nn::Hyperparams& hyper, int embed_dim)
    : hyper_(hyper), embed_dim_(embed_dim) {}

std::vector<int> RnnDescClassifier::token_indices(std::string_view raw) const {
    std::vector<int> indices;
    for (const auto& tok : text::tokenize_surfaces(text::normalize(raw))) {
        int idx = vocab_.index_of(tok);
        indices.push_back(idx >= 0 ? idx : static_cast<int>(vocab_.size()));  // shared OOV slot
    }
    return indices;
}

void RnnDescClassifier::fit(const std::vector<data::TrainPair>& pairs) {
    std::vector<std::vector<std::string>> corpus;
    bool has[2] = {false, false};
    for (const auto& pair : pairs) {
        if (pair.label != 0 && pair.label != 1) {
            throw Error("rnn_desc_train: labels must be 0 or 1");
        }
        has[pair.label] = true;
        corpus.push_back(text::tokenize_surfaces(text::normalize(pair.text)));
    }
    if (!has[0] || !has[1]) throw Error("rnn_desc_train: need at least one example per label");

    vocab_ = text::build_vocab(corpus, 2);
    const int rows = static_cast<int>(vocab_.size()) + 1;

    Rng rng(hyper_.seed);
    embeddings_ = nn::init_matrix(rows, embed_dim_, embed_dim_, rng);
    lstm_ = nn::make_lstm(embed_dim_, 2, hyper_, rng);

    std::vector<std::vector<int>> samples;
    std::vector<int> labels;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        auto indices = token_indices(pairs[i].text);
        if (indices.empty()) continue;  // nothing to feed the sequence model
        samples.push_back(std::move(indices));
        labels.push_back(pairs[i].label);
    }
    if (samples.empty()) throw Error("rnn_desc_train: all training texts tokenize to nothing");

    const Eigen::VectorXd weights = hyper_.label_weights();
    std::vector<int> order(samples.size());
    std::iota(order.begin(), order.end(), 0);
    for (int epoch = 0; epoch < hyper_.epochs; ++epoch) {
        rng.shuffle(order);
        for (int s : order) {
            const auto& indices = samples[s];
            std::vector<Eigen::VectorXd> inputs;
            inputs.reserve(indices.size());
            for (int idx : indices) inputs.push_back(embeddings_.row(idx).transpose());
            const int target[1] = {labels[s]};
            auto result = nn::lstm_loss_and_grads(lstm_, inputs, target, weights,
                                                  nn::HeadMode::MeanPool, true, &rng);

            // Embedding gradients take part in the global norm clip.
            Eigen::MatrixXd embed_grad = Eigen::MatrixXd::Zero(rows, embed_dim_);
            for (std::size_t t = 0; t < indices.size(); ++t) {
                embed_grad.row(indices[t]) += result.dinputs[t].transpose();
            }
            const double scale = nn::sgd_step(lstm_, result.grads, hyper_.learning_rate,
                                              kClipNorm, embed_grad.squaredNorm());
            embeddings_ -= hyper_.learning_rate * scale * embed_grad;
        }
    }
    fitted_ = true;
}

DescPrediction RnnDescClassifier::predict(std::string_view raw) const {
    if (!fitted_) throw Error("rnn_desc_predict: model not trained");
    auto indices = token_indices(raw);
    if (indices.empty()) return DescPrediction{0, 0.5};  // no tokens, no evidence
    std::vector<Eigen::VectorXd> inputs;
    inputs.reserve(indices.size());
    for (int idx : indices) inputs.push_back(embeddings_.row(idx).transpose());
    auto hs = nn::lstm_forward(lstm_, inputs, false, nullptr, nullptr);
    Eigen::VectorXd pooled = Eigen::VectorXd::Zero(lstm_.hidden());
    for (const auto& h : hs) pooled += h;
    pooled /= static_cast<double>(hs.size());
    const Eigen::VectorXd lp = nn::log_softmax(lstm_.proj_w * pooled + lstm_.proj_b);
    DescPrediction pred;
    pred.label = lp[1] > lp[0] ? 1 : 0;
    pred.confidence = std::exp(lp[pred.label]);
    return pred;
}

std::string RnnDescClassifier::to_json_string() const {
    nlohmann::json j = io::model_header("rnn-desc", hyper_.seed);
    j["hyperparams"] = io::hyper_to_json(hyper_);
    j["encoding"] = {{"vocab", vocab_.tokens()},
                     {"min_count", vocab_.min_count()},
                     {"embed_dim", embed_dim_}};
    j["params"] = {{"embeddings", io::to_json(embeddings_)}, {"lstm", io::lstm_to_json(lstm_)}};
    return j.dump(2);
}

RnnDescClassifier RnnDescClassifier::from_json_string(const std::string& json_text) {
    auto j = nlohmann::json::parse(json_text);
    io::check_model_header(j, "rnn-desc");
    RnnDescClassifier rnn(io::hyper_from_json(j.at("hyperparams")),
                          j.at("encoding").at("embed_dim").get<int>());
    rnn.vocab_ = text::Vocabulary(j.at("encoding").at("vocab").get<std::vector<std::string>>(),
                                  j.at("encoding").value("min_count", 2));
    rnn.embeddings_ = io::matrix_from_json(j.at("params").at("embeddings"));
    rnn.lstm_ = io::lstm_from_json(j.at("params").at("lstm"));
    if (rnn.embeddings_.rows() != static_cast<Eigen::Index>(rnn.vocab_.size()) + 1 ||
        rnn.embeddings_.cols() != rnn.embed_dim_) {
        throw Error("rnn-desc model file: embedding matrix shape mismatch");
    }
    rnn.fitted_ = true;
    return rnn;
}

}  // namespace prodlex::desc

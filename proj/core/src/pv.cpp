#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include <json.hpp>

#include "json_util.hpp"
#include "lstm_json.hpp"
#include "prodlex/desc.hpp"
#include "prodlex/error.hpp"

namespace prodlex::desc {

namespace {

double sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    double e = std::exp(x);
    return e / (1.0 + e);
}

std::uint64_t hash_tokens(const std::vector<std::string>& tokens) {
    std::uint64_t h = 1469598103934665603ULL;
    for (const auto& tok : tokens) {
        for (unsigned char c : tok) {
            h ^= c;
            h *= 1099511628211ULL;
        }
        h ^= 0xff;
        h *= 1099511628211ULL;
    }
    return h;
}

}  // namespace

void ParagraphVectorModel::train(const std::vector<std::vector<std::string>>& token_corpus,
                                 const PvParams& params) {
    if (token_corpus.empty()) throw Error("pv_train: empty corpus");
    params_ = params;
    vocab_ = text::build_vocab(token_corpus, params.min_count);

    token_counts_.assign(vocab_.size(), 0);
    std::vector<std::vector<int>> doc_indices(token_corpus.size());
    for (std::size_t d = 0; d < token_corpus.size(); ++d) {
        for (const auto& tok : token_corpus[d]) {
            int idx = vocab_.index_of(tok);
            if (idx >= 0) {
                doc_indices[d].push_back(idx);
                ++token_counts_[idx];
            }
        }
    }

    // Noise distribution: unigram counts raised to 0.75.
    noise_cdf_.resize(vocab_.size());
    double acc = 0.0;
    for (std::size_t k = 0; k < vocab_.size(); ++k) {
        acc += std::pow(static_cast<double>(token_counts_[k]), 0.75);
        noise_cdf_[k] = acc;
    }
    for (auto& v : noise_cdf_) v /= acc;

    const int dim = params_.dim;
    Rng rng(params_.seed);
    word_output_ = Eigen::MatrixXd::Zero(vocab_.size(), dim);
    doc_vectors_.resize(token_corpus.size(), dim);
    const double init_bound = 0.5 / static_cast<double>(dim);
    for (Eigen::Index r = 0; r < doc_vectors_.rows(); ++r) {
        for (int c = 0; c < dim; ++c) doc_vectors_(r, c) = rng.uniform(-init_bound, init_bound);
    }

    long long total_steps = 0;
    for (const auto& idx : doc_indices) total_steps += static_cast<long long>(idx.size());
    total_steps *= params_.epochs;
    if (total_steps == 0) return;  // every document was out of vocabulary

    std::vector<int> order(token_corpus.size());
    std::iota(order.begin(), order.end(), 0);
    long long step = 0;
    for (int epoch = 0; epoch < params_.epochs; ++epoch) {
        rng.shuffle(order);
        for (int d : order) {
            if (doc_indices[d].empty()) continue;
            Eigen::VectorXd dv = doc_vectors_.row(d);
            train_one(dv, doc_indices[d], &word_output_, step, total_steps, rng);
            doc_vectors_.row(d) = dv;
        }
    }
}

void ParagraphVectorModel::train_one(Eigen::Ref<Eigen::VectorXd> doc_vec,
                                     const std::vector<int>& word_indices,
                                     Eigen::MatrixXd* word_update, long long& step,
                                     long long total_steps, Rng& rng) const {
    const int dim = params_.dim;
    Eigen::VectorXd accum(dim);
    for (int word : word_indices) {
        const double progress =
            static_cast<double>(step) / static_cast<double>(std::max<long long>(1, total_steps));
        const double lr = params_.lr_start + (params_.lr_end - params_.lr_start) * progress;
        ++step;
        accum.setZero();
        for (int n = 0; n <= params_.negatives; ++n) {
            int target;
            double label;
            if (n == 0) {
                target = word;
                label = 1.0;
            } else {
                target = sample_negative(rng);
                if (target == word) continue;
                label = 0.0;
            }
            const Eigen::VectorXd out_row = word_output_.row(target).transpose();
            const double f = sigmoid(doc_vec.dot(out_row));
            const double g = (label - f) * lr;
            accum += g * out_row;
            if (word_update) word_update->row(target) += g * doc_vec.transpose();
        }
        doc_vec += accum;
    }
}

int ParagraphVectorModel::sample_negative(Rng& rng) const {
    const double u = rng.uniform();
    auto it = std::lower_bound(noise_cdf_.begin(), noise_cdf_.end(), u);
    if (it == noise_cdf_.end()) return static_cast<int>(noise_cdf_.size()) - 1;
    return static_cast<int>(it - noise_cdf_.begin());
}

Eigen::VectorXd ParagraphVectorModel::infer(const std::vector<std::string>& tokens) const {
    if (!trained()) throw Error("pv_infer: model not trained");
    std::vector<int> indices;
    for (const auto& tok : tokens) {
        int idx = vocab_.index_of(tok);
        if (idx >= 0) indices.push_back(idx);
    }
    const int dim = params_.dim;
    Rng rng(derive_seed(params_.seed, hash_tokens(tokens)));
    Eigen::VectorXd vec(dim);
    const double init_bound = 0.5 / static_cast<double>(dim);
    for (int c = 0; c < dim; ++c) vec[c] = rng.uniform(-init_bound, init_bound);
    if (indices.empty()) return vec;  // nothing in vocabulary: keep the fresh vector

    // Same schedule as training, word matrix frozen.
    long long step = 0;
    const long long total = static_cast<long long>(indices.size()) * params_.epochs;
    for (int epoch = 0; epoch < params_.epochs; ++epoch) {
        train_one(vec, indices, nullptr, step, total, rng);
    }
    return vec;
}

void ParagraphVectorModel::set_state(PvParams params, text::Vocabulary vocab,
                                     std::vector<long long> counts, Eigen::MatrixXd word_output,
                                     Eigen::MatrixXd doc_vectors) {
    params_ = params;
    vocab_ = std::move(vocab);
    token_counts_ = std::move(counts);
    word_output_ = std::move(word_output);
    doc_vectors_ = std::move(doc_vectors);
    noise_cdf_.resize(vocab_.size());
    double acc = 0.0;
    for (std::size_t k = 0; k < vocab_.size(); ++k) {
        acc += std::pow(static_cast<double>(token_counts_[k]), 0.75);
        noise_cdf_[k] = acc;
    }
    if (acc > 0.0) {
        for (auto& v : noise_cdf_) v /= acc;
    }
}

void ParagraphVectorClassifier::train_unsupervised(
    const std::vector<std::vector<std::string>>& token_corpus) {
    model_.train(token_corpus, params_);
}

void ParagraphVectorClassifier::fit(const std::vector<data::TrainPair>& pairs) {
    bool has[2] = {false, false};
    std::vector<std::vector<std::string>> corpus;
    train_texts_.clear();
    for (const auto& pair : pairs) {
        if (pair.label != 0 && pair.label != 1) throw Error("pv_train: labels must be 0 or 1");
        has[pair.label] = true;
        std::string normalized = text::normalize(pair.text);
        corpus.push_back(text::tokenize_surfaces(normalized));
        train_texts_.push_back(std::move(normalized));
    }
    if (!has[0] || !has[1]) throw Error("pv_train: need at least one example per label");
    train_unsupervised(corpus);
    fit_head(pairs);
}

Eigen::VectorXd ParagraphVectorClassifier::vector_for(std::string_view raw) const {
    const std::string normalized = text::normalize(raw);
    for (std::size_t d = 0; d < train_texts_.size(); ++d) {
        if (train_texts_[d] == normalized) return model_.doc_vectors().row(d).transpose();
    }
    return model_.infer(text::tokenize_surfaces(normalized));
}

void ParagraphVectorClassifier::fit_head(const std::vector<data::TrainPair>& pairs) {
    if (!model_.trained()) throw Error("pv_classify_train: unsupervised model not trained");
    const int dim = model_.params().dim;
    Eigen::MatrixXd x(pairs.size(), dim);
    Eigen::VectorXd y(pairs.size());
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        x.row(i) = vector_for(pairs[i].text).transpose();
        y[i] = pairs[i].label == 1 ? 1.0 : 0.0;
    }
    // Full-batch logistic regression with a small L2 term.
    const double lr = 0.5;
    const double l2 = 1e-4;
    const int iterations = 500;
    head_w_ = Eigen::VectorXd::Zero(dim);
    head_b_ = 0.0;
    const double n = static_cast<double>(pairs.size());
    for (int it = 0; it < iterations; ++it) {
        Eigen::VectorXd p = (x * head_w_).array() + head_b_;
        p = p.unaryExpr([](double v) { return sigmoid(v); });
        Eigen::VectorXd err = p - y;
        Eigen::VectorXd grad_w = x.transpose() * err / n + l2 * head_w_;
        head_w_ -= lr * grad_w;
        head_b_ -= lr * err.mean();
    }
    head_fitted_ = true;
}

DescPrediction ParagraphVectorClassifier::predict(std::string_view raw) const {
    if (!head_fitted_) throw Error("pv_classify: classifier head not fitted");
    const Eigen::VectorXd v = vector_for(raw);
    const double p_desc = sigmoid(head_w_.dot(v) + head_b_);
    DescPrediction pred;
    pred.label = p_desc > 0.5 ? 1 : 0;
    pred.confidence = pred.label == 1 ? p_desc : 1.0 - p_desc;
    return pred;
}

std::string ParagraphVectorClassifier::to_json_string() const {
    nlohmann::json j = io::model_header("pv", params_.seed);
    j["hyperparams"] = {{"dim", params_.dim},         {"epochs", params_.epochs},
                        {"negatives", params_.negatives}, {"lr_start", params_.lr_start},
                        {"lr_end", params_.lr_end},   {"min_count", params_.min_count}};
    j["encoding"] = {{"vocab", model_.vocab().tokens()},
                     {"token_counts", model_.token_counts()},
                     {"train_texts", train_texts_}};
    j["params"] = {{"word_output", io::to_json(model_.word_output())},
                   {"doc_vectors", io::to_json(model_.doc_vectors())},
                   {"head_w", io::to_json(head_w_)},
                   {"head_b", head_b_},
                   {"head_fitted", head_fitted_}};
    return j.dump(2);
}

ParagraphVectorClassifier ParagraphVectorClassifier::from_json_string(
    const std::string& json_text) {
    auto j = nlohmann::json::parse(json_text);
    io::check_model_header(j, "pv");
    PvParams params;
    const auto& hp = j.at("hyperparams");
    params.dim = hp.at("dim").get<int>();
    params.epochs = hp.at("epochs").get<int>();
    params.negatives = hp.at("negatives").get<int>();
    params.lr_start = hp.at("lr_start").get<double>();
    params.lr_end = hp.at("lr_end").get<double>();
    params.min_count = hp.at("min_count").get<int>();
    params.seed = j.value("seed", std::uint64_t{1});

    ParagraphVectorClassifier pv(params);
    text::Vocabulary vocab(j.at("encoding").at("vocab").get<std::vector<std::string>>(),
                           params.min_count);
    pv.model_.set_state(params, std::move(vocab),
                        j.at("encoding").at("token_counts").get<std::vector<long long>>(),
                        io::matrix_from_json(j.at("params").at("word_output")),
                        io::matrix_from_json(j.at("params").at("doc_vectors")));
    pv.train_texts_ = j.at("encoding").at("train_texts").get<std::vector<std::string>>();
    pv.head_w_ = io::vector_from_json(j.at("params").at("head_w"));
    pv.head_b_ = j.at("params").at("head_b").get<double>();
    pv.head_fitted_ = j.at("params").at("head_fitted").get<bool>();
    return pv;
}

}  // namespace prodlex::desc

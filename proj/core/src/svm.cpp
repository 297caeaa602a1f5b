#include <cmath>
#include <numeric>

#include <json.hpp>

#include "json_util.hpp"
#include "lstm_json.hpp"
#include "prodlex/desc.hpp"
#include "prodlex/error.hpp"
#include "prodlex/rng.hpp"

namespace prodlex::desc {

SvmWeights pegasos_train(const std::vector<BowVector>& features, const std::vector<int>& labels,
                         int dim, double lambda, int epochs, std::uint64_t seed) {
    if (features.size() != labels.size() || features.empty()) {
        throw Error("pegasos_train: features and labels must be parallel and non-empty");
    }
    SvmWeights sw;
    sw.w = Eigen::VectorXd::Zero(dim);
    sw.bias = 0.0;
    Rng rng(seed);
    std::vector<int> order(features.size());
    std::iota(order.begin(), order.end(), 0);
    long long t = 0;
    for (int epoch = 0; epoch < epochs; ++epoch) {
        rng.shuffle(order);
        for (int idx : order) {
            ++t;
            const double eta = 1.0 / (lambda * static_cast<double>(t));
            const double y = labels[idx] == 1 ? 1.0 : -1.0;
            const double margin = y * (features[idx].dot(sw.w) + sw.bias);
            sw.w *= (1.0 - eta * lambda);
            if (margin < 1.0) {
                for (const auto& [k, v] : features[idx].entries) sw.w[k] += eta * y * v;
                sw.bias += eta * y;
            }
        }
    }
    return sw;
}

void LinearSvmClassifier::fit(const std::vector<data::TrainPair>& pairs) {
    std::vector<std::vector<std::string>> corpus;
    std::vector<int> labels;
    bool has[2] = {false, false};
    for (const auto& pair : pairs) {
        if (pair.label != 0 && pair.label != 1) throw Error("svm_train: labels must be 0 or 1");
        has[pair.label] = true;
        corpus.push_back(text::tokenize_surfaces(text::normalize(pair.text)));
        labels.push_back(pair.label);
    }
    if (!has[0] || !has[1]) throw Error("svm_train: need at least one example per label");

    vectorizer_.fit(corpus, 1);
    std::vector<BowVector> features;
    features.reserve(corpus.size());
    for (const auto& doc : corpus) features.push_back(vectorizer_.transform(doc));
    weights_ = pegasos_train(features, labels, static_cast<int>(vectorizer_.vocab().size()),
                             lambda_, epochs_, seed_);
}

double LinearSvmClassifier::margin(std::string_view raw) const {
    if (!vectorizer_.fitted()) throw Error("svm_predict: model not trained");
    auto vec = vectorizer_.transform(text::tokenize_surfaces(text::normalize(raw)));
    return vec.dot(weights_.w) + weights_.bias;
}

DescPrediction LinearSvmClassifier::predict(std::string_view raw) const {
    const double m = margin(raw);
    DescPrediction pred;
    pred.label = m > 0.0 ? 1 : 0;  // margin 0 resolves to other
    const double p_desc = 1.0 / (1.0 + std::exp(-m));
    pred.confidence = pred.label == 1 ? p_desc : 1.0 - p_desc;
    return pred;
}

std::string LinearSvmClassifier::to_json_string() const {
    nlohmann::json j = io::model_header("svm", seed_);
    j["hyperparams"] = {{"lambda", lambda_}, {"epochs", epochs_}};
    j["encoding"] = {{"vocab", vectorizer_.vocab().tokens()},
                     {"min_count", vectorizer_.vocab().min_count()},
                     {"idf", vectorizer_.idf()}};
    j["params"] = {{"w", io::to_json(weights_.w)}, {"bias", weights_.bias}};
    return j.dump(2);
}

LinearSvmClassifier LinearSvmClassifier::from_json_string(const std::string& json_text) {
    auto j = nlohmann::json::parse(json_text);
    io::check_model_header(j, "svm");
    LinearSvmClassifier svm(j.value("seed", std::uint64_t{1}),
                            j.at("hyperparams").at("lambda").get<double>(),
                            j.at("hyperparams").at("epochs").get<int>());
    svm.vectorizer_.vocab_ =
        text::Vocabulary(j.at("encoding").at("vocab").get<std::vector<std::string>>(),
                         j.at("encoding").value("min_count", 1));
    svm.vectorizer_.idf_ = j.at("encoding").at("idf").get<std::vector<double>>();
    svm.weights_.w = io::vector_from_json(j.at("params").at("w"));
    svm.weights_.bias = j.at("params").at("bias").get<double>();
    if (svm.vectorizer_.idf_.size() != svm.vectorizer_.vocab_.size() ||
        svm.weights_.w.size() != static_cast<Eigen::Index>(svm.vectorizer_.vocab_.size())) {
        throw Error("svm model file: inconsistent dimensions");
    }
    return svm;
}

}  // namespace prodlex::desc

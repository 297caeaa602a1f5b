#include "prodlex/charname.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include <json.hpp>

#include "json_util.hpp"
#include "lstm_json.hpp"
#include "prodlex/error.hpp"
#include "prodlex/text.hpp"

namespace prodlex::charname {

namespace {

constexpr double kClipNorm = 5.0;

}  // namespace

int CharEncoding::index_of(char c) {
    if (c >= 'a' && c <= 'z') return c - 'a';
    if (c >= '0' && c <= '9') return 26 + (c - '0');
    if (c == '-') return 36;
    if (c == '\'') return 37;
    return kUnkIndex;
}

int CharEncoding::index_of_codepoint(char32_t cp) {
    if (cp < 0x80) return index_of(static_cast<char>(cp));
    return kUnkIndex;
}

std::vector<Eigen::VectorXd> encode_chars(std::string_view word) {
    const std::string normalized = text::normalize(word);
    std::vector<Eigen::VectorXd> encoded;
    std::size_t i = 0;
    while (i < normalized.size()) {
        // One vector per Unicode scalar value; multi-byte sequences are UNK.
        unsigned char b = static_cast<unsigned char>(normalized[i]);
        int index;
        if (b < 0x80) {
            if (b == ' ') {
                ++i;
                continue;
            }
            index = CharEncoding::index_of(static_cast<char>(b));
            ++i;
        } else {
            index = CharEncoding::kUnkIndex;
            ++i;
            while (i < normalized.size() &&
                   (static_cast<unsigned char>(normalized[i]) & 0xC0) == 0x80) {
                ++i;
            }
        }
        Eigen::VectorXd v = Eigen::VectorXd::Zero(CharEncoding::kDim);
        v[index] = 1.0;
        encoded.push_back(std::move(v));
    }
    if (encoded.empty()) throw Error("encode_chars: word is empty after normalization");
    return encoded;
}

CharNameModel::CharNameModel(nn::LstmModel lstm, std::string manufacturer)
    : lstm_(std::move(lstm)), manufacturer_(std::move(manufacturer)) {}

CharNamePrediction CharNameModel::predict(std::string_view word) const {
    if (!trained()) throw Error("charname_predict: model not trained");
    auto inputs = encode_chars(word);
    auto hs = nn::lstm_forward(lstm_, inputs, false, nullptr, nullptr);
    const Eigen::VectorXd lp = nn::log_softmax(lstm_.proj_w * hs.back() + lstm_.proj_b);
    CharNamePrediction pred;
    pred.probability = std::exp(lp[1]);
    pred.label = pred.probability > 0.5 ? 1 : 0;
    return pred;
}

CharNameModel charname_train(const std::vector<std::string>& positives,
                             const std::vector<std::string>& negatives,
                             const nn::Hyperparams& hyper, std::string manufacturer) {
    hyper.validate();
    auto dedupe = [](const std::vector<std::string>& words) {
        std::set<std::string> unique;
        for (const auto& w : words) {
            const std::string n = text::normalize(w);
            if (!n.empty()) unique.insert(n);
        }
        return std::vector<std::string>(unique.begin(), unique.end());
    };
    const auto pos = dedupe(positives);
    const auto neg = dedupe(negatives);
    if (pos.size() < 10 || neg.size() < 10) {
        throw Error("charname_train: insufficient data (need >= 10 distinct words per class)");
    }

    struct Sample {
        std::vector<Eigen::VectorXd> inputs;
        int label;
    };
    std::vector<Sample> samples;
    for (const auto& w : pos) samples.push_back({encode_chars(w), 1});
    for (const auto& w : neg) samples.push_back({encode_chars(w), 0});

    Rng rng(hyper.seed);
    nn::LstmModel lstm = nn::make_lstm(CharEncoding::kDim, 2, hyper, rng);
    const Eigen::VectorXd weights = hyper.label_weights();

    std::vector<int> order(samples.size());
    std::iota(order.begin(), order.end(), 0);
    for (int epoch = 0; epoch < hyper.epochs; ++epoch) {
        rng.shuffle(order);
        double epoch_loss = 0.0;
        for (int s : order) {
            const int target[1] = {samples[s].label};
            auto result = nn::lstm_loss_and_grads(lstm, samples[s].inputs, target, weights,
                                                  nn::HeadMode::FinalStep, true, &rng);
            epoch_loss += result.loss;
            nn::sgd_step(lstm, result.grads, hyper.learning_rate, kClipNorm);
        }
        if (!std::isfinite(epoch_loss)) {
            throw Error("charname_train: training diverged (non-finite epoch loss)");
        }
    }
    return CharNameModel(std::move(lstm), std::move(manufacturer));
}

std::string CharNameModel::to_json_string() const {
    nlohmann::json j = io::model_header("char-name", lstm_.hyper.seed);
    j["hyperparams"] = io::hyper_to_json(lstm_.hyper);
    j["encoding"] = {{"charset", "a-z 0-9 - ' UNK"}, {"dim", CharEncoding::kDim}};
    j["manufacturer"] = manufacturer_;
    j["params"] = {{"lstm", io::lstm_to_json(lstm_)}};
    return j.dump(2);
}

void CharNameModel::save(const std::string& path) const {
    io::write_file(path, to_json_string());
}

CharNameModel CharNameModel::from_json_string(const std::string& json_text) {
    auto j = nlohmann::json::parse(json_text);
    io::check_model_header(j, "char-name");
    if (j.at("encoding").at("dim").get<int>() != CharEncoding::kDim) {
        throw Error("char-name model file: unexpected character inventory size");
    }
    return CharNameModel(io::lstm_from_json(j.at("params").at("lstm")),
                         j.value("manufacturer", std::string{}));
}

CharNameModel CharNameModel::load(const std::string& path) {
    return from_json_string(io::slurp_file(path));
}

}  // namespace prodlex::charname

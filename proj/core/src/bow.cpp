#include <cmath>
#include <map>

#include "prodlex/desc.hpp"
#include "prodlex/error.hpp"

namespace prodlex::desc {

double BowVector::dot(const Eigen::VectorXd& dense) const {
    double sum = 0.0;
    for (const auto& [index, value] : entries) sum += value * dense[index];
    return sum;
}

void TfidfVectorizer::fit(const std::vector<std::vector<std::string>>& token_corpus,
                          int min_count) {
    vocab_ = text::build_vocab(token_corpus, min_count);
    std::vector<long long> df(vocab_.size(), 0);
    for (const auto& doc : token_corpus) {
        std::vector<bool> seen(vocab_.size(), false);
        for (const auto& tok : doc) {
            int idx = vocab_.index_of(tok);
            if (idx >= 0 && !seen[idx]) {
                seen[idx] = true;
                ++df[idx];
            }
        }
    }
    const double n = static_cast<double>(token_corpus.size());
    idf_.resize(vocab_.size());
    for (std::size_t k = 0; k < vocab_.size(); ++k) {
        idf_[k] = std::log((1.0 + n) / (1.0 + static_cast<double>(df[k]))) + 1.0;
    }
}

BowVector TfidfVectorizer::transform(const std::vector<std::string>& tokens) const {
    if (!fitted()) throw Error("TfidfVectorizer: transform before fit");
    std::map<int, double> tf;
    for (const auto& tok : tokens) {
        int idx = vocab_.index_of(tok);
        if (idx >= 0) tf[idx] += 1.0;
    }
    BowVector vec;
    double sq = 0.0;
    for (const auto& [idx, count] : tf) {
        const double v = count * idf_[idx];
        vec.entries.emplace_back(idx, v);
        sq += v * v;
    }
    if (sq > 0.0) {
        const double inv = 1.0 / std::sqrt(sq);
        for (auto& [idx, v] : vec.entries) v *= inv;
    }
    return vec;
}

}  // namespace prodlex::desc

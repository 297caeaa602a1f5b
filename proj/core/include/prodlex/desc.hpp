#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "prodlex/datasets.hpp"
#include "prodlex/nn.hpp"
#include "prodlex/text.hpp"

namespace prodlex::desc {

/// Binary decision over a text. label 1 = description, 0 = other;
/// confidence is the probability of the predicted label.
struct DescPrediction {
    int label = 0;
    double confidence = 0.5;
};

/// Common train/predict surface of the four description classifiers; they
/// are interchangeable in the CV harness and in split_scan.
class DescClassifier {
  public:
    virtual ~DescClassifier() = default;
    virtual void fit(const std::vector<data::TrainPair>& pairs) = 0;
    virtual DescPrediction predict(std::string_view text) const = 0;
    virtual std::string model_type() const = 0;
    /// Versioned JSON model document.
    virtual std::string to_json_string() const = 0;
    void save(const std::string& path) const;
};

std::unique_ptr<DescClassifier> make_desc_classifier(std::string_view type, std::uint64_t seed);
std::unique_ptr<DescClassifier> load_desc_classifier(const std::string& path);
std::unique_ptr<DescClassifier> desc_classifier_from_json_string(const std::string& json_text);

/// Sparse tf-idf vector, L2-normalized, indices strictly increasing.
struct BowVector {
    std::vector<std::pair<int, double>> entries;

    double dot(const Eigen::VectorXd& dense) const;
};

/// tf-idf over a Vocabulary with smoothed document frequencies.
class TfidfVectorizer {
  public:
    void fit(const std::vector<std::vector<std::string>>& token_corpus, int min_count = 1);
    BowVector transform(const std::vector<std::string>& tokens) const;
    const text::Vocabulary& vocab() const { return vocab_; }
    const std::vector<double>& idf() const { return idf_; }
    bool fitted() const { return !idf_.empty(); }

  private:
    text::Vocabulary vocab_;
    std::vector<double> idf_;

    friend class LinearSvmClassifier;
};

/// Multinomial naive Bayes with add-one smoothing over token counts.
class NaiveBayesClassifier : public DescClassifier {
  public:
    explicit NaiveBayesClassifier(std::uint64_t seed = 1) : seed_(seed) {}
    void fit(const std::vector<data::TrainPair>& pairs) override;
    DescPrediction predict(std::string_view text) const override;
    std::string model_type() const override { return "nb"; }
    std::string to_json_string() const override;
    static NaiveBayesClassifier from_json_string(const std::string& json_text);

    /// Posterior P(description | text); predictions argmax this.
    double posterior_description(std::string_view text) const;

  private:
    std::uint64_t seed_ = 1;
    text::Vocabulary vocab_;
    // counts[label][token index]; label 1 = description
    std::array<std::vector<long long>, 2> counts_;
    std::array<long long, 2> total_tokens_ = {0, 0};
    std::array<long long, 2> doc_counts_ = {0, 0};
};

/// Pegasos-style stochastic subgradient training of a linear SVM.
/// Returns the weight vector and unregularized bias.
struct SvmWeights {
    Eigen::VectorXd w;
    double bias = 0.0;
};
SvmWeights pegasos_train(const std::vector<BowVector>& features, const std::vector<int>& labels,
                         int dim, double lambda, int epochs, std::uint64_t seed);

/// Linear SVM on tf-idf features (lambda = 1e-4, 20 epochs).
class LinearSvmClassifier : public DescClassifier {
  public:
    explicit LinearSvmClassifier(std::uint64_t seed = 1, double lambda = 1e-4, int epochs = 20)
        : seed_(seed), lambda_(lambda), epochs_(epochs) {}
    void fit(const std::vector<data::TrainPair>& pairs) override;
    DescPrediction predict(std::string_view text) const override;
    std::string model_type() const override { return "svm"; }
    std::string to_json_string() const override;
    static LinearSvmClassifier from_json_string(const std::string& json_text);

    double margin(std::string_view text) const;

  private:
    std::uint64_t seed_ = 1;
    double lambda_ = 1e-4;
    int epochs_ = 20;
    TfidfVectorizer vectorizer_;
    SvmWeights weights_;
};

struct PvParams {
    int dim = 100;
    int epochs = 40;
    int negatives = 5;
    double lr_start = 0.025;
    double lr_end = 0.0001;
    int min_count = 2;
    std::uint64_t seed = 1;
};

/// Distributed bag-of-words paragraph vectors with negative sampling: each
/// document vector is trained to predict its own words against noise drawn
/// from the unigram^0.75 distribution.
class ParagraphVectorModel {
  public:
    void train(const std::vector<std::vector<std::string>>& token_corpus, const PvParams& params);
    /// Gradient steps on a fresh vector with the word matrix frozen.
    Eigen::VectorXd infer(const std::vector<std::string>& tokens) const;

    bool trained() const { return doc_vectors_.size() > 0; }
    const Eigen::MatrixXd& doc_vectors() const { return doc_vectors_; }
    const Eigen::MatrixXd& word_output() const { return word_output_; }
    const text::Vocabulary& vocab() const { return vocab_; }
    const PvParams& params() const { return params_; }
    const std::vector<long long>& token_counts() const { return token_counts_; }

    void set_state(PvParams params, text::Vocabulary vocab, std::vector<long long> counts,
                   Eigen::MatrixXd word_output, Eigen::MatrixXd doc_vectors);

  private:
    void train_one(Eigen::Ref<Eigen::VectorXd> doc_vec, const std::vector<int>& word_indices,
                   Eigen::MatrixXd* word_update, long long& step, long long total_steps,
                   Rng& rng) const;
    int sample_negative(Rng& rng) const;

    PvParams params_;
    text::Vocabulary vocab_;
    std::vector<long long> token_counts_;  // per vocab index
    std::vector<double> noise_cdf_;
    Eigen::MatrixXd word_output_;  // |vocab| x dim
    Eigen::MatrixXd doc_vectors_;  // docs x dim
};

/// Paragraph vectors + logistic regression head.
class ParagraphVectorClassifier : public DescClassifier {
  public:
    explicit ParagraphVectorClassifier(std::uint64_t seed = 1) { params_.seed = seed; }
    explicit ParagraphVectorClassifier(PvParams params) : params_(params) {}
    void fit(const std::vector<data::TrainPair>& pairs) override;
    DescPrediction predict(std::string_view text) const override;
    std::string model_type() const override { return "pv"; }
    std::string to_json_string() const override;
    static ParagraphVectorClassifier from_json_string(const std::string& json_text);

    /// The unsupervised stage alone (doc vectors trained, no head yet).
    void train_unsupervised(const std::vector<std::vector<std::string>>& token_corpus);
    /// Fits the logistic head; texts matching a training document reuse its
    /// trained vector, anything else is inferred.
    void fit_head(const std::vector<data::TrainPair>& pairs);
    const ParagraphVectorModel& model() const { return model_; }

  private:
    Eigen::VectorXd vector_for(std::string_view text) const;

    PvParams params_;
    ParagraphVectorModel model_;
    std::vector<std::string> train_texts_;  // normalized, index-aligned with doc vectors
    Eigen::VectorXd head_w_;
    double head_b_ = 0.0;
    bool head_fitted_ = false;
};

/// Learned-embedding LSTM classifier: mean-pooled hidden states feed a
/// two-label log-softmax.
class RnnDescClassifier : public DescClassifier {
  public:
    explicit RnnDescClassifier(std::uint64_t seed = 1);
    RnnDescClassifier(const nn::Hyperparams& hyper, int embed_dim);
    void fit(const std::vector<data::TrainPair>& pairs) override;
    DescPrediction predict(std::string_view text) const override;
    std::string model_type() const override { return "rnn-desc"; }
    std::string to_json_string() const override;
    static RnnDescClassifier from_json_string(const std::string& json_text);

    const nn::LstmModel& lstm() const { return lstm_; }

  private:
    std::vector<int> token_indices(std::string_view text) const;

    nn::Hyperparams hyper_;
    int embed_dim_ = 50;
    text::Vocabulary vocab_;
    Eigen::MatrixXd embeddings_;  // (|vocab|+1) x embed_dim, last row = shared OOV
    nn::LstmModel lstm_;
    bool fitted_ = false;
};

/// A detected type change inside a longer text.
struct SplitPoint {
    int token_index = 0;
    int left_label = 0;
    int right_label = 0;
    double left_confidence = 0.0;
    double right_confidence = 0.0;
};

/// Sliding-window split detection: classifies windows of `window` tokens
/// every `stride` tokens and reports midpoints between consecutive windows
/// whose labels differ with confidence >= threshold on both sides.
/// Reported splits are at least `window` tokens apart (left-greedy).
std::vector<SplitPoint> split_scan(const DescClassifier& classifier, std::string_view raw_text,
                                   int window = 20, int stride = 5, double threshold = 0.7);

}  // namespace prodlex::desc

#pragma once

// Internal wiring shared by the subcommand implementations.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "prodlex/desc.hpp"
#include "prodlex/eval.hpp"
#include "prodlex/nn.hpp"

namespace prodlex::cli {

std::uint64_t default_seed();

/// Optional hyperparameter overrides shared by the LSTM-based trainers.
struct HyperFlags {
    std::optional<int> hidden_units;
    std::optional<int> num_layers;
    std::optional<int> epochs;
    std::optional<double> dropout_p;
    std::optional<double> learning_rate;
    std::optional<double> weight_other;
    std::optional<double> weight_product;
    // paragraph-vector extras
    std::optional<int> pv_dim;
    std::optional<int> pv_negatives;

    void apply(nn::Hyperparams& hyper) const;
    void apply(desc::PvParams& params) const;
};

void add_hyper_flags(CLI::App* cmd, HyperFlags& flags, bool with_pv);

std::unique_ptr<desc::DescClassifier> build_desc_classifier(const std::string& type,
                                                            std::uint64_t seed,
                                                            const HyperFlags& flags);

/// Cross-validation drivers used by both `train` and `eval`.
cv::FoldReport desc_cv(const std::vector<data::TrainPair>& pairs, const std::string& type,
                       int folds, std::uint64_t seed, const HyperFlags& flags);
cv::FoldReport charname_cv(const std::vector<std::string>& positives,
                           const std::vector<std::string>& negatives,
                           const nn::Hyperparams& hyper, int folds, std::uint64_t seed);
cv::FoldReport tagger_cv(const std::vector<data::TaggedSentence>& sentences,
                         const data::EmbeddingTable& embeddings, const nn::Hyperparams& hyper,
                         int folds, std::uint64_t seed);

/// Parses a model JSON document, embeds the resolved config, writes it out.
void save_model_with_config(const std::string& path, const std::string& model_json,
                            const nlohmann::json& config);

void emit_report(const cv::FoldReport& report, const std::string& row_label,
                 const nlohmann::json& config, const std::string& report_path);

nlohmann::json hyper_config_json(const nn::Hyperparams& hyper);

/// Runs a CV task described by a config document (the same document train
/// subcommands echo into their artifacts).
void run_eval_config(const nlohmann::json& config, const std::string& report_path);

// Subcommand registration, one per group.
void register_data_commands(CLI::App& app);
void register_train_commands(CLI::App& app);
void register_predict_commands(CLI::App& app);

}  // namespace prodlex::cli

#include <cstdio>
#include <fstream>
#include <iostream>

#include <json.hpp>

#include "cli_impl.hpp"
#include "prodlex/charname.hpp"
#include "prodlex/datasets.hpp"
#include "prodlex/error.hpp"
#include "prodlex/reference_scores.hpp"
#include "prodlex/tagger.hpp"

namespace prodlex::cli {

using nlohmann::json;

void HyperFlags::apply(nn::Hyperparams& hyper) const {
    if (hidden_units) hyper.hidden_units = *hidden_units;
    if (num_layers) hyper.num_layers = *num_layers;
    if (epochs) hyper.epochs = *epochs;
    if (dropout_p) hyper.dropout_p = *dropout_p;
    if (learning_rate) hyper.learning_rate = *learning_rate;
    if (weight_other) hyper.weight_other = *weight_other;
    if (weight_product) hyper.weight_product = *weight_product;
}

void HyperFlags::apply(desc::PvParams& params) const {
    if (pv_dim) params.dim = *pv_dim;
    if (epochs) params.epochs = *epochs;
    if (pv_negatives) params.negatives = *pv_negatives;
}

void add_hyper_flags(CLI::App* cmd, HyperFlags& flags, bool with_pv) {
    cmd->add_option("--hidden-units", flags.hidden_units, "LSTM hidden units per layer");
    cmd->add_option("--layers", flags.num_layers, "stacked LSTM layers");
    cmd->add_option("--epochs", flags.epochs, "training epochs");
    cmd->add_option("--dropout", flags.dropout_p, "input dropout probability");
    cmd->add_option("--lr", flags.learning_rate, "learning rate");
    cmd->add_option("--weight-other", flags.weight_other, "loss weight of the negative label");
    cmd->add_option("--weight-product", flags.weight_product,
                    "loss weight of the positive label");
    if (with_pv) {
        cmd->add_option("--dim", flags.pv_dim, "paragraph vector dimension");
        cmd->add_option("--negatives", flags.pv_negatives, "negative samples per word");
    }
}

std::unique_ptr<desc::DescClassifier> build_desc_classifier(const std::string& type,
                                                            std::uint64_t seed,
                                                            const HyperFlags& flags) {
    if (type == "nb") return std::make_unique<desc::NaiveBayesClassifier>(seed);
    if (type == "svm") return std::make_unique<desc::LinearSvmClassifier>(seed);
    if (type == "pv") {
        desc::PvParams params;
        params.seed = seed;
        flags.apply(params);
        return std::make_unique<desc::ParagraphVectorClassifier>(params);
    }
    if (type == "rnn" || type == "rnn-desc") {
        nn::Hyperparams hyper = nn::charname_defaults();  // hidden 50, 1 layer, lr 0.1
        hyper.seed = seed;
        flags.apply(hyper);
        return std::make_unique<desc::RnnDescClassifier>(hyper, 50);
    }
    throw Error("unknown description classifier type: \"" + type + "\"");
}

cv::FoldReport desc_cv(const std::vector<data::TrainPair>& pairs, const std::string& type,
                       int folds, std::uint64_t seed, const HyperFlags& flags) {
    std::vector<int> strata;
    strata.reserve(pairs.size());
    for (const auto& p : pairs) strata.push_back(p.label);
    auto runner = [&](const std::vector<int>& train_idx, const std::vector<int>& test_idx,
                      std::uint64_t fold_seed) {
        auto clf = build_desc_classifier(type, fold_seed, flags);
        std::vector<data::TrainPair> train;
        train.reserve(train_idx.size());
        for (int i : train_idx) train.push_back(pairs[i]);
        clf->fit(train);
        std::vector<int> predicted, gold;
        for (int i : test_idx) {
            predicted.push_back(clf->predict(pairs[i].text).label);
            gold.push_back(pairs[i].label);
        }
        return std::make_pair(predicted, gold);
    };
    return cv::cross_validate(static_cast<int>(pairs.size()), folds, seed, 1, runner, &strata);
}

cv::FoldReport charname_cv(const std::vector<std::string>& positives,
                           const std::vector<std::string>& negatives,
                           const nn::Hyperparams& hyper, int folds, std::uint64_t seed) {
    struct Word {
        std::string word;
        int label;
    };
    std::vector<Word> words;
    std::vector<int> strata;
    for (const auto& w : positives) {
        words.push_back({w, 1});
        strata.push_back(1);
    }
    for (const auto& w : negatives) {
        words.push_back({w, 0});
        strata.push_back(0);
    }
    auto runner = [&](const std::vector<int>& train_idx, const std::vector<int>& test_idx,
                      std::uint64_t fold_seed) {
        std::vector<std::string> pos, neg;
        for (int i : train_idx) {
            (words[i].label == 1 ? pos : neg).push_back(words[i].word);
        }
        nn::Hyperparams fold_hyper = hyper;
        fold_hyper.seed = fold_seed;
        auto model = charname::charname_train(pos, neg, fold_hyper);
        std::vector<int> predicted, gold;
        for (int i : test_idx) {
            predicted.push_back(model.predict(words[i].word).label);
            gold.push_back(words[i].label);
        }
        return std::make_pair(predicted, gold);
    };
    return cv::cross_validate(static_cast<int>(words.size()), folds, seed, 1, runner, &strata);
}

cv::FoldReport tagger_cv(const std::vector<data::TaggedSentence>& sentences,
                         const data::EmbeddingTable& embeddings, const nn::Hyperparams& hyper,
                         int folds, std::uint64_t seed) {
    auto runner = [&](const std::vector<int>& train_idx, const std::vector<int>& test_idx,
                      std::uint64_t fold_seed) {
        std::vector<data::TaggedSentence> train;
        train.reserve(train_idx.size());
        for (int i : train_idx) train.push_back(sentences[i]);
        nn::Hyperparams fold_hyper = hyper;
        fold_hyper.seed = fold_seed;
        auto model = tagger::tagger_train(train, embeddings, fold_hyper);
        std::vector<int> predicted, gold;
        for (int i : test_idx) {
            auto result = model.tag_tokens(sentences[i].tokens, embeddings);
            predicted.insert(predicted.end(), result.labels.begin(), result.labels.end());
            gold.insert(gold.end(), sentences[i].labels.begin(), sentences[i].labels.end());
        }
        return std::make_pair(predicted, gold);
    };
    return cv::cross_validate(static_cast<int>(sentences.size()), folds, seed, 1, runner,
                              nullptr);
}

void save_model_with_config(const std::string& path, const std::string& model_json,
                            const json& config) {
    json j = json::parse(model_json);
    j["config"] = config;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write model file: " + path);
    out << j.dump(2);
    if (!out) throw Error("write failed: " + path);
}

void emit_report(const cv::FoldReport& report, const std::string& row_label, const json& config,
                 const std::string& report_path) {
    std::fputs(cv::render_table(report, row_label).c_str(), stdout);
    if (!report_path.empty()) {
        std::ofstream out(report_path, std::ios::trunc);
        if (!out) throw Error("cannot write report: " + report_path);
        out << cv::report_to_json(report, config.dump()) << "\n";
    }
}

json hyper_config_json(const nn::Hyperparams& hyper) {
    return {{"hidden_units", hyper.hidden_units}, {"num_layers", hyper.num_layers},
            {"dropout_p", hyper.dropout_p},       {"learning_rate", hyper.learning_rate},
            {"epochs", hyper.epochs},             {"weight_other", hyper.weight_other},
            {"weight_product", hyper.weight_product}};
}

namespace {

void print_reference_footer(std::initializer_list<reference::ScoreRow> rows) {
    std::printf("reference results (original data, for comparison only):\n");
    for (const auto& row : rows) {
        std::printf("  %-26s P %.2f  R %.2f  Acc %.2f  F1 %.2f\n", row.name, row.precision,
                    row.recall, row.accuracy, row.f1);
    }
}

struct TrainDescOpts {
    std::string model_type = "nb";
    std::string data;
    int folds = 5;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::string out;
    std::string report;
    HyperFlags flags;
};

void run_train_desc(const TrainDescOpts& opts) {
    const std::uint64_t seed = opts.seed_set ? opts.seed : default_seed();
    auto snippets = data::load_snippets(opts.data);
    auto pairs = data::training_pairs(snippets);
    if (pairs.empty()) throw Error("train desc: no usable training pairs in " + opts.data);

    json config = {{"subcommand", "train desc"}, {"model", opts.model_type},
                   {"data", opts.data},          {"folds", opts.folds},
                   {"seed", seed},               {"task", "desc"}};

    auto report = desc_cv(pairs, opts.model_type, opts.folds, seed, opts.flags);
    emit_report(report, opts.model_type, config, opts.report);
    print_reference_footer({reference::kDescNaiveBayes, reference::kDescSvm,
                            reference::kDescParagraphVector, reference::kDescRnn});

    if (!opts.out.empty()) {
        auto final_model = build_desc_classifier(opts.model_type, seed, opts.flags);
        final_model->fit(pairs);
        save_model_with_config(opts.out, final_model->to_json_string(), config);
        std::printf("model written to %s\n", opts.out.c_str());
    }
}

struct TrainCharnameOpts {
    std::string positives;
    std::string negatives;
    std::string manufacturer;
    int folds = 5;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::string out;
    std::string report;
    HyperFlags flags;
};

void run_train_charname(const TrainCharnameOpts& opts) {
    const std::uint64_t seed = opts.seed_set ? opts.seed : default_seed();
    auto positives = data::load_word_list(opts.positives);
    auto negatives = data::load_word_list(opts.negatives);
    nn::Hyperparams hyper = nn::charname_defaults();
    opts.flags.apply(hyper);
    hyper.seed = seed;

    json config = {{"subcommand", "train charname"},
                   {"positives", opts.positives},
                   {"negatives", opts.negatives},
                   {"manufacturer", opts.manufacturer},
                   {"folds", opts.folds},
                   {"seed", seed},
                   {"task", "charname"},
                   {"hyperparams", hyper_config_json(hyper)}};

    auto report = charname_cv(positives, negatives, hyper, opts.folds, seed);
    emit_report(report, "char-name", config, opts.report);
    print_reference_footer({reference::kCharNameLstm, reference::kCharNameNativeSpeaker});

    if (!opts.out.empty()) {
        auto model = charname::charname_train(positives, negatives, hyper, opts.manufacturer);
        save_model_with_config(opts.out, model.to_json_string(), config);
        std::printf("model written to %s\n", opts.out.c_str());
    }
}

struct TrainTaggerOpts {
    std::string data;
    std::string glove;
    std::string category;
    int folds = 5;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::string out;
    std::string report;
    HyperFlags flags;
};

void run_train_tagger(const TrainTaggerOpts& opts) {
    const std::uint64_t seed = opts.seed_set ? opts.seed : default_seed();
    auto sentences = data::load_tagged_sentences(opts.data);
    auto embeddings = data::load_embeddings(opts.glove);
    const std::string checksum = data::file_checksum(opts.glove);
    nn::Hyperparams hyper = nn::tagger_defaults();
    opts.flags.apply(hyper);
    hyper.seed = seed;

    json config = {{"subcommand", "train tagger"},
                   {"data", opts.data},
                   {"glove", opts.glove},
                   {"category", opts.category},
                   {"folds", opts.folds},
                   {"seed", seed},
                   {"task", "tagger"},
                   {"embedding_dim", embeddings.dim()},
                   {"embedding_checksum", checksum},
                   {"hyperparams", hyper_config_json(hyper)}};

    auto report = tagger_cv(sentences, embeddings, hyper, opts.folds, seed);
    emit_report(report, "tagger", config, opts.report);
    print_reference_footer({reference::kTaggerOfficeProducts, reference::kTaggerCdsAndVinyl});

    if (!opts.out.empty()) {
        auto model = tagger::tagger_train(sentences, embeddings, hyper, checksum, opts.category);
        save_model_with_config(opts.out, model.to_json_string(), config);
        std::printf("model written to %s\n", opts.out.c_str());
    }
}

}  // namespace

void run_eval_config(const json& config, const std::string& report_path) {
    if (!config.is_object() || !config.contains("task")) {
        throw Error("eval: config must be an object with a \"task\" field");
    }
    const std::string task = config.at("task").get<std::string>();
    const int folds = config.value("folds", 5);
    const std::uint64_t seed = config.value("seed", default_seed());
    HyperFlags flags;
    if (config.contains("hyperparams")) {
        const auto& h = config.at("hyperparams");
        if (h.contains("hidden_units")) flags.hidden_units = h.at("hidden_units").get<int>();
        if (h.contains("num_layers")) flags.num_layers = h.at("num_layers").get<int>();
        if (h.contains("epochs")) flags.epochs = h.at("epochs").get<int>();
        if (h.contains("dropout_p")) flags.dropout_p = h.at("dropout_p").get<double>();
        if (h.contains("learning_rate")) flags.learning_rate = h.at("learning_rate").get<double>();
        if (h.contains("weight_other")) flags.weight_other = h.at("weight_other").get<double>();
        if (h.contains("weight_product"))
            flags.weight_product = h.at("weight_product").get<double>();
    }

    if (task == "desc") {
        auto snippets = data::load_snippets(config.at("data").get<std::string>());
        auto pairs = data::training_pairs(snippets);
        const std::string type = config.value("model", "nb");
        auto report = desc_cv(pairs, type, folds, seed, flags);
        emit_report(report, type, config, report_path);
        return;
    }
    if (task == "charname") {
        auto positives = data::load_word_list(config.at("positives").get<std::string>());
        auto negatives = data::load_word_list(config.at("negatives").get<std::string>());
        nn::Hyperparams hyper = nn::charname_defaults();
        flags.apply(hyper);
        auto report = charname_cv(positives, negatives, hyper, folds, seed);
        emit_report(report, "char-name", config, report_path);
        return;
    }
    if (task == "tagger") {
        auto sentences = data::load_tagged_sentences(config.at("data").get<std::string>());
        auto embeddings = data::load_embeddings(config.at("glove").get<std::string>());
        nn::Hyperparams hyper = nn::tagger_defaults();
        flags.apply(hyper);
        auto report = tagger_cv(sentences, embeddings, hyper, folds, seed);
        emit_report(report, "tagger", config, report_path);
        return;
    }
    throw Error("eval: unknown task \"" + task + "\"");
}

void register_train_commands(CLI::App& app) {
    auto* train = app.add_subcommand("train", "Train a classifier with k-fold cross-validation");
    train->require_subcommand(1);

    {
        auto opts = std::make_shared<TrainDescOpts>();
        auto* cmd = train->add_subcommand("desc", "description vs other classifier");
        cmd->add_option("--model", opts->model_type, "nb | svm | pv | rnn-desc")
            ->capture_default_str();
        cmd->add_option("--data", opts->data, "snippets JSONL")->required();
        cmd->add_option("--folds", opts->folds, "cross-validation folds")->capture_default_str();
        cmd->add_option("--seed", opts->seed, "rng seed (default: PRODLEX_SEED or 1)")
            ->each([opts](const std::string&) { opts->seed_set = true; });
        cmd->add_option("--out", opts->out, "write the final model here");
        cmd->add_option("--report", opts->report, "write the JSON fold report here");
        add_hyper_flags(cmd, opts->flags, true);
        cmd->callback([opts] { run_train_desc(*opts); });
    }
    {
        auto opts = std::make_shared<TrainCharnameOpts>();
        auto* cmd = train->add_subcommand("charname", "single-word product-name classifier");
        cmd->add_option("--positives", opts->positives, "product-name word list")->required();
        cmd->add_option("--negatives", opts->negatives, "out-of-domain word list")->required();
        cmd->add_option("--manufacturer", opts->manufacturer, "manufacturer tag");
        cmd->add_option("--folds", opts->folds, "cross-validation folds")->capture_default_str();
        cmd->add_option("--seed", opts->seed, "rng seed (default: PRODLEX_SEED or 1)")
            ->each([opts](const std::string&) { opts->seed_set = true; });
        cmd->add_option("--out", opts->out, "write the final model here");
        cmd->add_option("--report", opts->report, "write the JSON fold report here");
        add_hyper_flags(cmd, opts->flags, false);
        cmd->callback([opts] { run_train_charname(*opts); });
    }
    {
        auto opts = std::make_shared<TrainTaggerOpts>();
        auto* cmd = train->add_subcommand("tagger", "per-token product-name tagger");
        cmd->add_option("--data", opts->data, "tagged sentences JSONL")->required();
        cmd->add_option("--glove", opts->glove, "embedding file (GloVe text format)")->required();
        cmd->add_option("--category", opts->category, "category tag");
        cmd->add_option("--folds", opts->folds, "cross-validation folds")->capture_default_str();
        cmd->add_option("--seed", opts->seed, "rng seed (default: PRODLEX_SEED or 1)")
            ->each([opts](const std::string&) { opts->seed_set = true; });
        cmd->add_option("--out", opts->out, "write the final model here");
        cmd->add_option("--report", opts->report, "write the JSON fold report here");
        add_hyper_flags(cmd, opts->flags, false);
        cmd->callback([opts] { run_train_tagger(*opts); });
    }

    auto* eval = app.add_subcommand("eval", "Re-run cross-validation from a config document");
    auto config_path = std::make_shared<std::string>();
    auto report_path = std::make_shared<std::string>();
    eval->add_option("--config", *config_path, "config JSON (as echoed into artifacts)")
        ->required();
    eval->add_option("--report", *report_path, "write the JSON fold report here");
    eval->callback([config_path, report_path] {
        std::ifstream in(*config_path);
        if (!in) throw Error("cannot open config: " + *config_path);
        json config = json::parse(in, nullptr, false);
        if (config.is_discarded()) throw Error("invalid JSON in " + *config_path);
        if (config.is_object() && config.contains("config")) config = config.at("config");
        run_eval_config(config, *report_path);
    });
}

}  // namespace prodlex::cli

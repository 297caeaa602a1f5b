#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cli_impl.hpp"
#include "prodlex/charname.hpp"
#include "prodlex/datasets.hpp"
#include "prodlex/error.hpp"
#include "prodlex/model_io.hpp"
#include "prodlex/tagger.hpp"

namespace prodlex::cli {

namespace {

using nlohmann::json;

void write_json_report(const std::string& path, const json& j) {
    if (path.empty()) return;
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error("cannot write " + path);
    out << j.dump(2) << "\n";
}

void setup_predict(CLI::App& app) {
    auto* predict = app.add_subcommand("predict", "Classify a single text or word");
    predict->require_subcommand(1);

    {
        auto* cmd = predict->add_subcommand("desc", "description vs other");
        auto model_path = std::make_shared<std::string>();
        auto text = std::make_shared<std::string>();
        auto report = std::make_shared<std::string>();
        cmd->add_option("--model", *model_path, "model file")->required();
        cmd->add_option("text", *text, "text to classify")->required();
        cmd->add_option("--report", *report, "write the JSON result here");
        cmd->callback([model_path, text, report] {
            auto clf = desc::load_desc_classifier(*model_path);
            auto pred = clf->predict(*text);
            std::printf("label=%s confidence=%.6f\n", pred.label == 1 ? "description" : "other",
                        pred.confidence);
            write_json_report(*report,
                              {{"format_version", 1},
                               {"config", {{"subcommand", "predict desc"}, {"model", *model_path}}},
                               {"label", pred.label == 1 ? "description" : "other"},
                               {"confidence", pred.confidence}});
        });
    }
    {
        auto* cmd = predict->add_subcommand("charname", "product-name plausibility of one word");
        auto model_path = std::make_shared<std::string>();
        auto word = std::make_shared<std::string>();
        auto report = std::make_shared<std::string>();
        cmd->add_option("--model", *model_path, "char-name model file")->required();
        cmd->add_option("word", *word, "word to score")->required();
        cmd->add_option("--report", *report, "write the JSON result here");
        cmd->callback([model_path, word, report] {
            auto model = charname::CharNameModel::load(*model_path);
            auto pred = model.predict(*word);
            std::printf("word=%s p(product)=%.6f label=%s\n", word->c_str(), pred.probability,
                        pred.label == 1 ? "product" : "other");
            write_json_report(
                *report, {{"format_version", 1},
                          {"config", {{"subcommand", "predict charname"}, {"model", *model_path}}},
                          {"word", *word},
                          {"probability", pred.probability},
                          {"label", pred.label == 1 ? "product" : "other"}});
        });
    }
}

void setup_tag(CLI::App& app) {
    auto* cmd = app.add_subcommand("tag", "Label every token of a sentence as product/other");
    auto model_path = std::make_shared<std::string>();
    auto glove = std::make_shared<std::string>();
    auto sentence = std::make_shared<std::string>();
    auto report = std::make_shared<std::string>();
    cmd->add_option("--model", *model_path, "tagger model file")->required();
    cmd->add_option("--glove", *glove, "embedding file used at training time")->required();
    cmd->add_option("sentence", *sentence, "sentence to tag")->required();
    cmd->add_option("--report", *report, "write the JSON result here");
    cmd->callback([model_path, glove, sentence, report] {
        auto model = tagger::TaggerModel::load(*model_path);
        auto embeddings = data::load_embeddings(*glove);
        model.check_embeddings(embeddings, data::file_checksum(*glove));
        auto result = model.tag(*sentence, embeddings);
        json tokens = json::array();
        for (std::size_t t = 0; t < result.tokens.size(); ++t) {
            std::printf("%-20s %-8s %.6f\n", result.tokens[t].c_str(),
                        result.labels[t] == 1 ? "product" : "other",
                        result.product_probability[t]);
            tokens.push_back({{"token", result.tokens[t]},
                              {"label", result.labels[t] == 1 ? "product" : "other"},
                              {"p_product", result.product_probability[t]}});
        }
        write_json_report(*report,
                          {{"format_version", 1},
                           {"config", {{"subcommand", "tag"}, {"model", *model_path}}},
                           {"tokens", tokens}});
    });
}

void setup_split_scan(CLI::App& app) {
    auto* cmd = app.add_subcommand(
        "split-scan", "Detect type changes inside a longer text with a sliding window");
    auto model_path = std::make_shared<std::string>();
    auto text = std::make_shared<std::string>();
    auto input = std::make_shared<std::string>();
    auto report = std::make_shared<std::string>();
    auto window = std::make_shared<int>(20);
    auto stride = std::make_shared<int>(5);
    auto threshold = std::make_shared<double>(0.7);
    cmd->add_option("--model", *model_path, "description classifier model file")->required();
    cmd->add_option("text", *text, "text to scan");
    cmd->add_option("--input", *input, "read the text from this file instead");
    cmd->add_option("--window", *window, "window size in tokens")->capture_default_str();
    cmd->add_option("--stride", *stride, "window stride in tokens")->capture_default_str();
    cmd->add_option("--threshold", *threshold, "confidence gate for both windows")
        ->capture_default_str();
    cmd->callback([model_path, text, input, report, window, stride, threshold] {
        std::string content = *text;
        if (!input->empty()) {
            std::ifstream in(*input, std::ios::binary);
            if (!in) throw Error("cannot open " + *input);
            std::ostringstream buf;
            buf << in.rdbuf();
            content = buf.str();
        }
        if (content.empty()) throw Error("split-scan: no text given");
        auto clf = desc::load_desc_classifier(*model_path);
        auto splits = desc::split_scan(*clf, content, *window, *stride, *threshold);
        if (splits.empty()) {
            std::printf("no split points\n");
        }
        json arr = json::array();
        for (const auto& s : splits) {
            std::printf("split at token %d: %s -> %s (conf %.3f / %.3f)\n", s.token_index,
                        s.left_label == 1 ? "description" : "other",
                        s.right_label == 1 ? "description" : "other", s.left_confidence,
                        s.right_confidence);
            arr.push_back({{"token_index", s.token_index},
                           {"left_label", s.left_label == 1 ? "description" : "other"},
                           {"right_label", s.right_label == 1 ? "description" : "other"},
                           {"left_confidence", s.left_confidence},
                           {"right_confidence", s.right_confidence}});
        }
        write_json_report(*report, {{"format_version", 1},
                                    {"config",
                                     {{"subcommand", "split-scan"},
                                      {"model", *model_path},
                                      {"window", *window},
                                      {"stride", *stride},
                                      {"threshold", *threshold}}},
                                    {"splits", arr}});
    });
    cmd->add_option("--report", *report, "write the JSON result here");
}

}  // namespace

void register_predict_commands(CLI::App& app) {
    setup_predict(app);
    setup_tag(app);
    setup_split_scan(app);
}

}  // namespace prodlex::cli

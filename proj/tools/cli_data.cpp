#include <cstdio>
#include <fstream>
#include <iostream>

#include <json.hpp>

#include "cli_impl.hpp"
#include "prodlex/datasets.hpp"
#include "prodlex/error.hpp"
#include "prodlex/nn.hpp"
#include "prodlex/tagger.hpp"

namespace prodlex::cli {

namespace {

using nlohmann::json;

void write_meta(const std::string& out_path, const json& config, const json& stats) {
    json meta;
    meta["format_version"] = 1;
    meta["config"] = config;
    meta["stats"] = stats;
    std::ofstream out(out_path + ".meta.json", std::ios::trunc);
    if (!out) throw Error("cannot write " + out_path + ".meta.json");
    out << meta.dump(2) << "\n";
}

void setup_filter_amazon(CLI::App& app) {
    auto* cmd = app.add_subcommand("filter-amazon",
                                   "Filter a product catalog by description/title length and "
                                   "title-in-description match");
    auto input = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>();
    auto policy = std::make_shared<data::FilterPolicy>();
    cmd->add_option("--input", *input, "products JSONL file")->required();
    cmd->add_option("--out", *out, "filtered JSONL output")->required();
    cmd->add_option("--min-desc-chars", policy->min_desc_chars,
                    "keep descriptions strictly longer than this many characters")
        ->capture_default_str();
    cmd->add_option("--min-title-chars", policy->min_title_chars,
                    "keep titles strictly longer than this many characters")
        ->capture_default_str();
    cmd->add_flag("--require-name-match,!--no-require-name-match", policy->require_name_match,
                  "require the title (or a title prefix) to occur in the description")
        ->capture_default_str();

    cmd->callback([input, out, policy] {
        auto loaded = data::load_products(*input);
        data::FilterStats stats;
        auto kept = data::filter_products(loaded.records, *policy, &stats);

        std::string body;
        for (const auto& rec : kept) {
            json j = {{"id", rec.id},
                      {"title", rec.title},
                      {"description", rec.description},
                      {"category", rec.category}};
            body += j.dump();
            body += '\n';
        }
        std::ofstream of(*out, std::ios::binary | std::ios::trunc);
        if (!of) throw Error("cannot write " + *out);
        of << body;

        json config = {{"subcommand", "filter-amazon"},
                       {"input", *input},
                       {"out", *out},
                       {"min_desc_chars", policy->min_desc_chars},
                       {"min_title_chars", policy->min_title_chars},
                       {"require_name_match", policy->require_name_match},
                       {"seed", default_seed()}};
        json stats_json = {{"seen", stats.seen},
                           {"kept", stats.kept},
                           {"ratio", stats.ratio},
                           {"skipped_lines", loaded.skipped}};
        write_meta(*out, config, stats_json);
        std::printf("seen=%lld kept=%lld ratio=%.6f skipped=%lld\n", stats.seen, stats.kept,
                    stats.ratio, loaded.skipped);
    });
}

void setup_make_tagged(CLI::App& app) {
    auto* cmd = app.add_subcommand(
        "make-tagged", "Derive per-token product labels from filtered catalog records");
    auto input = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>();
    cmd->add_option("--input", *input, "filtered products JSONL")->required();
    cmd->add_option("--out", *out, "tagged sentences JSONL output")->required();

    cmd->callback([input, out] {
        auto loaded = data::load_products(*input);
        std::vector<data::TaggedSentence> sentences;
        long long unmatched = 0;
        for (const auto& rec : loaded.records) {
            try {
                auto tagged = data::make_tagged_sentences(rec);
                sentences.insert(sentences.end(), tagged.begin(), tagged.end());
            } catch (const Error&) {
                ++unmatched;
            }
        }
        data::write_tagged_sentences(*out, sentences);
        json config = {{"subcommand", "make-tagged"},
                       {"input", *input},
                       {"out", *out},
                       {"seed", default_seed()}};
        json stats = {{"records", static_cast<long long>(loaded.records.size())},
                      {"sentences", static_cast<long long>(sentences.size())},
                      {"unmatched_records", unmatched},
                      {"skipped_lines", loaded.skipped}};
        write_meta(*out, config, stats);
        std::printf("records=%lld sentences=%lld unmatched=%lld\n",
                    static_cast<long long>(loaded.records.size()),
                    static_cast<long long>(sentences.size()), unmatched);
    });
}

void setup_baselines(CLI::App& app) {
    auto* cmd = app.add_subcommand(
        "baselines", "Score the constant all-other / all-product taggers on a labeled corpus");
    auto input = std::make_shared<std::string>();
    auto report_path = std::make_shared<std::string>();
    cmd->add_option("--data", *input, "tagged sentences JSONL")->required();
    cmd->add_option("--report", *report_path, "write the JSON report here");

    cmd->callback([input, report_path] {
        auto sentences = data::load_tagged_sentences(*input);
        auto report = tagger::baseline_scores(sentences);
        std::printf("tokens=%lld positive_rate=%.6f\n", report.tokens, report.positive_rate);
        std::printf("%-12s %9s %9s %9s %9s\n", "baseline", "Precision", "Recall", "Accuracy",
                    "F1");
        std::printf("%-12s %9.3f %9.3f %9.3f %9.3f\n", "all-zero", report.all_zero.precision,
                    report.all_zero.recall, report.all_zero.accuracy, report.all_zero.f1);
        std::printf("%-12s %9.3f %9.3f %9.3f %9.3f\n", "all-one", report.all_one.precision,
                    report.all_one.recall, report.all_one.accuracy, report.all_one.f1);
        if (!report_path->empty()) {
            json j = {{"format_version", 1},
                      {"config", {{"subcommand", "baselines"}, {"data", *input}}},
                      {"tokens", report.tokens},
                      {"positive_rate", report.positive_rate},
                      {"all_zero",
                       {{"accuracy", report.all_zero.accuracy},
                        {"precision", report.all_zero.precision},
                        {"recall", report.all_zero.recall},
                        {"f1", report.all_zero.f1}}},
                      {"all_one",
                       {{"accuracy", report.all_one.accuracy},
                        {"precision", report.all_one.precision},
                        {"recall", report.all_one.recall},
                        {"f1", report.all_one.f1}}}};
            std::ofstream out(*report_path, std::ios::trunc);
            if (!out) throw Error("cannot write " + *report_path);
            out << j.dump(2) << "\n";
        }
    });
}

void setup_grad_check(CLI::App& app) {
    auto* cmd = app.add_subcommand(
        "grad-check", "Verify analytic gradients against central finite differences");
    auto trials = std::make_shared<int>(100);
    auto eps = std::make_shared<double>(1e-5);
    auto tolerance = std::make_shared<double>(1e-4);
    auto seed = std::make_shared<std::uint64_t>(default_seed());
    cmd->add_option("--trials", *trials, "random configurations to test")->capture_default_str();
    cmd->add_option("--eps", *eps, "finite difference step")->capture_default_str();
    cmd->add_option("--tolerance", *tolerance, "max allowed relative error")
        ->capture_default_str();
    cmd->add_option("--seed", *seed, "rng seed")->capture_default_str();

    cmd->callback([trials, eps, tolerance, seed] {
        auto report = nn::grad_check(*trials, *eps, *seed);
        std::printf("trials=%d coordinates=%lld max_rel_error=%.3e tolerance=%.1e\n",
                    report.trials, report.coordinates, report.max_rel_error, *tolerance);
        if (report.max_rel_error > *tolerance) {
            throw Error("gradient check failed: max relative error above tolerance");
        }
        std::printf("gradient check passed\n");
    });
}

}  // namespace

void register_data_commands(CLI::App& app) {
    setup_filter_amazon(app);
    setup_make_tagged(app);
    setup_baselines(app);
    setup_grad_check(app);
}

}  // namespace prodlex::cli

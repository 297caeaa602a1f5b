#include "prodlex/eval.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include <json.hpp>

#include "prodlex/error.hpp"
#include "prodlex/rng.hpp"

namespace prodlex::cv {

Metrics finish_metrics(long long tp, long long fp, long long fn, long long tn) {
    Metrics m;
    m.tp = tp;
    m.fp = fp;
    m.fn = fn;
    m.tn = tn;
    if (tp + fp > 0) {
        m.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
    } else {
        m.degenerate = true;
    }
    if (tp + fn > 0) {
        m.recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
    } else {
        m.degenerate = true;
    }
    long long total = tp + fp + fn + tn;
    m.accuracy = total > 0 ? static_cast<double>(tp + tn) / static_cast<double>(total) : 0.0;
    if (m.precision + m.recall > 0.0) {
        m.f1 = 2.0 * m.precision * m.recall / (m.precision + m.recall);
    } else {
        m.degenerate = true;
    }
    return m;
}

Metrics compute_metrics(const std::vector<int>& predicted, const std::vector<int>& gold,
                        int positive) {
    if (predicted.size() != gold.size()) {
        throw Error("compute_metrics: predicted and gold lengths differ");
    }
    if (predicted.empty()) throw Error("compute_metrics: empty label vectors");
    long long tp = 0, fp = 0, fn = 0, tn = 0;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        bool p = predicted[i] == positive;
        bool g = gold[i] == positive;
        if (p && g)
            ++tp;
        else if (p && !g)
            ++fp;
        else if (!p && g)
            ++fn;
        else
            ++tn;
    }
    return finish_metrics(tp, fp, fn, tn);
}

FoldReport make_fold_report(std::vector<Metrics> folds, int k, std::uint64_t seed) {
    FoldReport report;
    report.k = k;
    report.seed = seed;
    long long tp = 0, fp = 0, fn = 0, tn = 0;
    for (const auto& m : folds) {
        report.mean.precision += m.precision;
        report.mean.recall += m.recall;
        report.mean.accuracy += m.accuracy;
        report.mean.f1 += m.f1;
        tp += m.tp;
        fp += m.fp;
        fn += m.fn;
        tn += m.tn;
    }
    const double n = folds.empty() ? 1.0 : static_cast<double>(folds.size());
    report.mean.precision /= n;
    report.mean.recall /= n;
    report.mean.accuracy /= n;
    report.mean.f1 /= n;
    report.pooled = finish_metrics(tp, fp, fn, tn);
    report.folds = std::move(folds);
    return report;
}

std::vector<std::vector<int>> kfold_split(int n, int k, std::uint64_t seed,
                                          const std::vector<int>* strata) {
    if (k < 2) throw Error("kfold_split: k must be >= 2");
    if (n < k) throw Error("kfold_split: fewer samples than folds");
    if (strata && static_cast<int>(strata->size()) != n) {
        throw Error("kfold_split: strata length mismatch");
    }
    Rng rng(seed);
    std::vector<std::vector<int>> folds(k);
    if (!strata) {
        std::vector<int> order(n);
        std::iota(order.begin(), order.end(), 0);
        rng.shuffle(order);
        int base = n / k, extra = n % k;
        std::size_t pos = 0;
        for (int f = 0; f < k; ++f) {
            int size = base + (f < extra ? 1 : 0);
            folds[f].assign(order.begin() + pos, order.begin() + pos + size);
            pos += size;
        }
        return folds;
    }
    // Stratified: deal each label group round-robin, continuing the fold
    // cursor across groups so overall sizes also stay within one.
    std::map<int, std::vector<int>> groups;
    for (int i = 0; i < n; ++i) groups[(*strata)[i]].push_back(i);
    int cursor = 0;
    for (auto& [label, idx] : groups) {
        rng.shuffle(idx);
        for (int i : idx) {
            folds[cursor].push_back(i);
            cursor = (cursor + 1) % k;
        }
    }
    return folds;
}

FoldReport cross_validate(int n, int k, std::uint64_t seed, int positive,
                          const FoldRunner& run_fold, const std::vector<int>* strata) {
    auto folds = kfold_split(n, k, seed, strata);
    std::vector<Metrics> fold_metrics;
    fold_metrics.reserve(folds.size());
    for (int f = 0; f < k; ++f) {
        std::vector<int> train_idx;
        train_idx.reserve(n - folds[f].size());
        for (int g = 0; g < k; ++g) {
            if (g == f) continue;
            train_idx.insert(train_idx.end(), folds[g].begin(), folds[g].end());
        }
        std::sort(train_idx.begin(), train_idx.end());
        if (strata) {
            std::map<int, int> seen;
            for (int i : train_idx) ++seen[(*strata)[i]];
            std::map<int, int> all;
            for (int v : *strata) ++all[v];
            for (auto& [label, cnt] : all) {
                if (!seen.count(label)) {
                    throw Error("cross_validate: fold " + std::to_string(f) +
                                " training split lacks label " + std::to_string(label));
                }
            }
        }
        auto test_idx = folds[f];
        std::sort(test_idx.begin(), test_idx.end());
        auto [predicted, gold] = run_fold(train_idx, test_idx, derive_seed(seed, f));
        fold_metrics.push_back(compute_metrics(predicted, gold, positive));
    }
    return make_fold_report(std::move(fold_metrics), k, seed);
}

namespace {

nlohmann::json metrics_json(const Metrics& m) {
    return {{"tp", m.tp},
            {"fp", m.fp},
            {"fn", m.fn},
            {"tn", m.tn},
            {"precision", m.precision},
            {"recall", m.recall},
            {"accuracy", m.accuracy},
            {"f1", m.f1},
            {"degenerate", m.degenerate}};
}

}  // namespace

std::string render_table(const FoldReport& report, const std::string& row_label) {
    char line[256];
    std::string out;
    std::snprintf(line, sizeof(line), "%-28s %9s %9s %9s %9s\n", "Model", "Precision",
                  "Recall", "Accuracy", "F1");
    out += line;
    for (std::size_t f = 0; f < report.folds.size(); ++f) {
        const auto& m = report.folds[f];
        std::snprintf(line, sizeof(line), "%-28s %9.2f %9.2f %9.2f %9.2f\n",
                      ("  fold " + std::to_string(f)).c_str(), m.precision, m.recall,
                      m.accuracy, m.f1);
        out += line;
    }
    std::snprintf(line, sizeof(line), "%-28s %9.2f %9.2f %9.2f %9.2f\n",
                  (row_label + " (mean)").c_str(), report.mean.precision, report.mean.recall,
                  report.mean.accuracy, report.mean.f1);
    out += line;
    std::snprintf(line, sizeof(line), "%-28s %9.2f %9.2f %9.2f %9.2f\n",
                  (row_label + " (pooled)").c_str(), report.pooled.precision,
                  report.pooled.recall, report.pooled.accuracy, report.pooled.f1);
    out += line;
    return out;
}

std::string report_to_json(const FoldReport& report, const std::string& config_json) {
    nlohmann::json j;
    j["format_version"] = 1;
    j["k"] = report.k;
    j["seed"] = report.seed;
    j["folds"] = nlohmann::json::array();
    for (const auto& m : report.folds) j["folds"].push_back(metrics_json(m));
    j["mean"] = {{"precision", report.mean.precision},
                 {"recall", report.mean.recall},
                 {"accuracy", report.mean.accuracy},
                 {"f1", report.mean.f1}};
    j["pooled"] = metrics_json(report.pooled);
    if (!config_json.empty()) j["config"] = nlohmann::json::parse(config_json);
    return j.dump(2);
}

}  // namespace prodlex::cv

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace prodlex::cv {

/// Confusion counts and the derived measures of a binary evaluation.
/// Zero-denominator precision/recall/F1 are defined as 0 and flagged.
struct Metrics {
    long long tp = 0;
    long long fp = 0;
    long long fn = 0;
    long long tn = 0;
    double precision = 0.0;
    double recall = 0.0;
    double accuracy = 0.0;
    double f1 = 0.0;
    bool degenerate = false;  // some denominator was zero

    long long total() const { return tp + fp + fn + tn; }
};

/// Fills the derived fields from the counts.
Metrics finish_metrics(long long tp, long long fp, long long fn, long long tn);

/// Counts agreement between predicted and gold labels (any integer labels;
/// `positive` selects the positive class). Throws on length mismatch.
Metrics compute_metrics(const std::vector<int>& predicted, const std::vector<int>& gold,
                        int positive);

struct MeanScores {
    double precision = 0.0;
    double recall = 0.0;
    double accuracy = 0.0;
    double f1 = 0.0;
};

/// Per-fold metrics plus the two aggregations: arithmetic mean of the
/// derived measures (the headline) and metrics recomputed from pooled counts.
struct FoldReport {
    std::vector<Metrics> folds;
    MeanScores mean;
    Metrics pooled;
    int k = 0;
    std::uint64_t seed = 0;
};

FoldReport make_fold_report(std::vector<Metrics> folds, int k, std::uint64_t seed);

/// Seeded shuffle split into k folds of size floor(n/k) or ceil(n/k).
/// With strata given (one label per sample), per-fold label counts differ
/// by at most one. Throws when n < k or k < 2.
std::vector<std::vector<int>> kfold_split(int n, int k, std::uint64_t seed,
                                          const std::vector<int>* strata = nullptr);

/// One cross-validation fold duty: fit on the training indices, then return
/// (predicted, gold) label pairs for the held-out indices. Token-level tasks
/// may return more labels than indices.
using FoldRunner = std::function<std::pair<std::vector<int>, std::vector<int>>(
    const std::vector<int>& train_indices, const std::vector<int>& test_indices,
    std::uint64_t fold_seed)>;

/// K-fold cross-validation over n samples. `positive` is the positive label
/// for metric computation; strata (if given) stratify the folds and are
/// checked so every training split carries every label.
FoldReport cross_validate(int n, int k, std::uint64_t seed, int positive,
                          const FoldRunner& run_fold,
                          const std::vector<int>* strata = nullptr);

/// Plain-text table in Precision / Recall / Accuracy / F1 column order.
std::string render_table(const FoldReport& report, const std::string& row_label);

/// Machine-readable report {folds:[...], mean:{...}, pooled:{...}, k, seed}
/// serialized as JSON. `config_json`, when non-empty, is embedded verbatim
/// under "config".
std::string report_to_json(const FoldReport& report, const std::string& config_json = "");

}  // namespace prodlex::cv

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "prodlex/text.hpp"

namespace prodlex::data {

/// One catalog entry as found in the products JSONL file.
struct ProductRecord {
    std::string id;
    std::string title;
    std::string description;
    std::string category;
};

enum class SnippetLabel { description, other, undecided };

SnippetLabel parse_snippet_label(std::string_view s);  // throws on unknown label
std::string to_string(SnippetLabel label);

/// Short hand-labeled text snippet.
struct LabeledSnippet {
    std::string text;
    SnippetLabel label = SnippetLabel::undecided;
    std::string manufacturer;
};

/// Token labels for the tagging task. Label 1 = product, 0 = other.
struct TaggedSentence {
    std::vector<text::Token> tokens;
    std::vector<int> labels;
};

/// (text, binary label) supervision pair; label 1 = description/positive.
struct TrainPair {
    std::string text;
    int label = 0;
};

/// Pre-trained word vectors. Lookup of an absent token returns the
/// all-zeros vector.
class EmbeddingTable {
  public:
    EmbeddingTable() = default;
    EmbeddingTable(int dim, std::unordered_map<std::string, Eigen::VectorXd> vectors);

    int dim() const { return dim_; }
    std::size_t size() const { return vectors_.size(); }
    bool contains(const std::string& token) const { return vectors_.count(token) > 0; }
    const Eigen::VectorXd& lookup(const std::string& token) const;
    const Eigen::VectorXd& oov_vector() const { return oov_; }
    const std::unordered_map<std::string, Eigen::VectorXd>& vectors() const { return vectors_; }

  private:
    int dim_ = 0;
    std::unordered_map<std::string, Eigen::VectorXd> vectors_;
    Eigen::VectorXd oov_;
};

/// Catalog filtering rule. Both length bounds are exclusive and measured in
/// Unicode scalar values of the normalized text.
struct FilterPolicy {
    int min_desc_chars = 200;
    int min_title_chars = 6;
    bool require_name_match = true;
};

struct FilterStats {
    long long seen = 0;
    long long kept = 0;
    double ratio = 0.0;  // kept / seen, 0 when nothing seen
};

/// Inclusive token-index range [first, last] in a description token list.
struct Span {
    int first = 0;
    int last = 0;
};

struct LoadedProducts {
    std::vector<ProductRecord> records;
    long long skipped = 0;  // malformed lines
};

/// Reads a products JSONL file (fields id, title, description, category;
/// missing title/description/category default to empty). Malformed lines are
/// counted and skipped; an unreadable file throws.
LoadedProducts load_products(const std::string& path);

/// Every maximal occurrence of the full title token sequence inside the
/// description tokens; when the full title is absent and has at least two
/// tokens, falls back to the longest title prefix (tried longest first, down
/// to two tokens) that occurs. Spans are non-overlapping and left-greedy.
/// Throws on an empty title.
std::vector<Span> match_title(const std::vector<text::Token>& description_tokens,
                              const std::vector<text::Token>& title_tokens);

/// Applies the policy; output preserves input order.
std::vector<ProductRecord> filter_products(const std::vector<ProductRecord>& records,
                                           const FilterPolicy& policy, FilterStats* stats);

/// Splits the (filtered) record's description into sentences and labels every
/// token covered by a title match as product. Throws when no span matches
/// (the record would violate the filter precondition).
std::vector<TaggedSentence> make_tagged_sentences(const ProductRecord& record);

struct SnippetCounts {
    long long description = 0;
    long long other = 0;
    long long undecided = 0;
};

/// Reads the hand-labeled snippet JSONL file. Unknown labels abort with the
/// offending line number.
std::vector<LabeledSnippet> load_snippets(const std::string& path,
                                          SnippetCounts* counts = nullptr);

/// Keeps description/other snippets as binary pairs; undecided is dropped.
std::vector<TrainPair> training_pairs(const std::vector<LabeledSnippet>& snippets);

/// Reads a GloVe-format text file (token followed by `dim` decimal reals per
/// line). Dimension is inferred from the first line and enforced afterwards;
/// a mismatch throws with the line number.
EmbeddingTable load_embeddings(const std::string& path,
                               std::optional<int> expected_dim = std::nullopt);

/// FNV-1a 64 of a file's bytes, as fixed-width hex. Used to pin a tagger
/// model to the embedding file it was trained with.
std::string file_checksum(const std::string& path);

/// Word list file: one word per line, '#' comment lines and blanks ignored.
std::vector<std::string> load_word_list(const std::string& path);

/// Serialization of tagged sentences: {"tokens": [...], "labels":
/// ["product"|"other", ...]} per line.
void write_tagged_sentences(const std::string& path,
                            const std::vector<TaggedSentence>& sentences);
std::vector<TaggedSentence> load_tagged_sentences(const std::string& path);

}  // namespace prodlex::data

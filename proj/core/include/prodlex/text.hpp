#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace prodlex::text {

struct TransparentStringHash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const {
        return std::hash<std::string_view>{}(s);
    }
};

/// One normalized token. `surface` is lowercase with no leading/trailing
/// punctuation; `char_len` counts Unicode scalar values, not bytes.
struct Token {
    std::string surface;
    int char_len = 0;

    bool operator==(const Token& other) const { return surface == other.surface; }
};

/// Dense token -> index mapping, indices assigned in descending frequency
/// (ties broken lexicographically).
class Vocabulary {
  public:
    Vocabulary() = default;
    Vocabulary(std::vector<std::string> index_to_token, int min_count);

    /// Index of `token`, or -1 when absent.
    int index_of(std::string_view token) const;
    bool contains(std::string_view token) const { return index_of(token) >= 0; }
    std::size_t size() const { return index_to_token_.size(); }
    const std::string& token_at(std::size_t index) const { return index_to_token_[index]; }
    const std::vector<std::string>& tokens() const { return index_to_token_; }
    int min_count() const { return min_count_; }

  private:
    std::vector<std::string> index_to_token_;
    std::unordered_map<std::string, int, TransparentStringHash, std::equal_to<>> token_to_index_;
    int min_count_ = 1;
};

/// Lowercases, folds Latin accented letters to their base letters, strips
/// combining marks, collapses whitespace runs to single spaces, and trims.
/// Idempotent; empty input yields empty output.
std::string normalize(std::string_view raw);

/// Unicode scalar value count of a UTF-8 string.
std::size_t char_len(std::string_view utf8);

/// Splits normalized text on whitespace and strips leading/trailing
/// punctuation per token. Tokens that become empty are dropped; interior
/// hyphens, apostrophes and alphanumerics survive.
std::vector<Token> tokenize(std::string_view normalized);

/// Convenience: surfaces only.
std::vector<std::string> tokenize_surfaces(std::string_view normalized);

/// Splits after '.', '!' or '?' followed by whitespace. Terminators are
/// retained; abbreviations are not special-cased.
std::vector<std::string> split_sentences(std::string_view normalized);

/// Builds a Vocabulary over all tokens with frequency >= min_count.
/// Throws prodlex::Error("vocabulary empty") when nothing survives.
Vocabulary build_vocab(const std::vector<std::vector<std::string>>& corpus, int min_count);

}  // namespace prodlex::text

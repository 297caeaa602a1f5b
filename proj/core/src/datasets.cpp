#include "prodlex/datasets.hpp"

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "json_util.hpp"
#include "prodlex/error.hpp"

namespace prodlex::data {

namespace {

using nlohmann::json;

std::string get_string_field(const json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return "";
    if (!it->is_string()) throw Error(std::string("field is not a string: ") + key);
    return it->get<std::string>();
}

bool is_blank(const std::string& line) {
    for (char c : line) {
        if (static_cast<unsigned char>(c) > ' ') return false;
    }
    return true;
}

}  // namespace

SnippetLabel parse_snippet_label(std::string_view s) {
    if (s == "description") return SnippetLabel::description;
    if (s == "other") return SnippetLabel::other;
    if (s == "undecided") return SnippetLabel::undecided;
    throw Error("unknown snippet label: \"" + std::string(s) + "\"");
}

std::string to_string(SnippetLabel label) {
    switch (label) {
        case SnippetLabel::description: return "description";
        case SnippetLabel::other: return "other";
        case SnippetLabel::undecided: return "undecided";
    }
    return "?";
}

EmbeddingTable::EmbeddingTable(int dim, std::unordered_map<std::string, Eigen::VectorXd> vectors)
    : dim_(dim), vectors_(std::move(vectors)), oov_(Eigen::VectorXd::Zero(dim)) {
    for (const auto& [token, vec] : vectors_) {
        if (static_cast<int>(vec.size()) != dim_) {
            throw Error("embedding dimension mismatch for token: " + token);
        }
    }
}

const Eigen::VectorXd& EmbeddingTable::lookup(const std::string& token) const {
    auto it = vectors_.find(token);
    return it == vectors_.end() ? oov_ : it->second;
}

LoadedProducts load_products(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open products file: " + path);
    LoadedProducts result;
    std::string line;
    while (std::getline(in, line)) {
        if (is_blank(line)) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object()) {
            ++result.skipped;
            continue;
        }
        ProductRecord rec;
        try {
            rec.id = get_string_field(j, "id");
            rec.title = get_string_field(j, "title");
            rec.description = get_string_field(j, "description");
            rec.category = get_string_field(j, "category");
        } catch (const Error&) {
            ++result.skipped;
            continue;
        }
        if (rec.id.empty()) {
            ++result.skipped;
            continue;
        }
        result.records.push_back(std::move(rec));
    }
    return result;
}

namespace {

// Left-greedy, non-overlapping occurrences of the first `len` title tokens.
std::vector<Span> occurrences(const std::vector<text::Token>& haystack,
                              const std::vector<text::Token>& needle, std::size_t len) {
    std::vector<Span> spans;
    if (len == 0 || haystack.size() < len) return spans;
    std::size_t i = 0;
    while (i + len <= haystack.size()) {
        bool match = true;
        for (std::size_t k = 0; k < len; ++k) {
            if (haystack[i + k].surface != needle[k].surface) {
                match = false;
                break;
            }
        }
        if (match) {
            spans.push_back(Span{static_cast<int>(i), static_cast<int>(i + len - 1)});
            i += len;
        } else {
            ++i;
        }
    }
    return spans;
}

}  // namespace

std::vector<Span> match_title(const std::vector<text::Token>& description_tokens,
                              const std::vector<text::Token>& title_tokens) {
    if (title_tokens.empty()) throw Error("match_title: empty title");
    auto spans = occurrences(description_tokens, title_tokens, title_tokens.size());
    if (!spans.empty() || title_tokens.size() < 2) return spans;
    for (std::size_t len = title_tokens.size() - 1; len >= 2; --len) {
        spans = occurrences(description_tokens, title_tokens, len);
        if (!spans.empty()) return spans;
    }
    return {};
}

std::vector<ProductRecord> filter_products(const std::vector<ProductRecord>& records,
                                           const FilterPolicy& policy, FilterStats* stats) {
    std::vector<ProductRecord> kept;
    FilterStats s;
    for (const auto& rec : records) {
        ++s.seen;
        const std::string desc = text::normalize(rec.description);
        const std::string title = text::normalize(rec.title);
        if (static_cast<long long>(text::char_len(desc)) <= policy.min_desc_chars) continue;
        if (static_cast<long long>(text::char_len(title)) <= policy.min_title_chars) continue;
        if (policy.require_name_match) {
            auto title_tokens = text::tokenize(title);
            if (title_tokens.empty()) continue;
            if (match_title(text::tokenize(desc), title_tokens).empty()) continue;
        }
        kept.push_back(rec);
        ++s.kept;
    }
    s.ratio = s.seen > 0 ? static_cast<double>(s.kept) / static_cast<double>(s.seen) : 0.0;
    if (stats) *stats = s;
    return kept;
}

std::vector<TaggedSentence> make_tagged_sentences(const ProductRecord& record) {
    const std::string desc = text::normalize(record.description);
    const std::string title = text::normalize(record.title);
    auto title_tokens = text::tokenize(title);
    if (title_tokens.empty()) throw Error("make_tagged_sentences: record has an empty title");

    auto sentences = text::split_sentences(desc);
    std::vector<std::vector<text::Token>> sentence_tokens;
    std::vector<text::Token> flat;
    for (const auto& s : sentences) {
        auto toks = text::tokenize(s);
        for (const auto& t : toks) flat.push_back(t);
        sentence_tokens.push_back(std::move(toks));
    }

    auto spans = match_title(flat, title_tokens);
    if (spans.empty()) {
        throw Error("make_tagged_sentences: no title match in record " + record.id);
    }
    std::vector<int> product_flag(flat.size(), 0);
    for (const auto& span : spans) {
        for (int i = span.first; i <= span.last; ++i) product_flag[i] = 1;
    }

    std::vector<TaggedSentence> out;
    std::size_t offset = 0;
    for (auto& toks : sentence_tokens) {
        if (toks.empty()) continue;
        TaggedSentence ts;
        ts.labels.assign(product_flag.begin() + offset, product_flag.begin() + offset + toks.size());
        offset += toks.size();
        ts.tokens = std::move(toks);
        out.push_back(std::move(ts));
    }
    return out;
}

std::vector<LabeledSnippet> load_snippets(const std::string& path, SnippetCounts* counts) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open snippets file: " + path);
    std::vector<LabeledSnippet> snippets;
    SnippetCounts c;
    std::string line;
    long long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (is_blank(line)) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object()) {
            throw Error("snippets file line " + std::to_string(line_no) + ": invalid JSON");
        }
        LabeledSnippet snip;
        snip.text = get_string_field(j, "text");
        snip.manufacturer = get_string_field(j, "manufacturer");
        if (snip.text.empty()) {
            throw Error("snippets file line " + std::to_string(line_no) + ": empty text");
        }
        try {
            snip.label = parse_snippet_label(get_string_field(j, "label"));
        } catch (const Error& e) {
            throw Error("snippets file line " + std::to_string(line_no) + ": " + e.what());
        }
        switch (snip.label) {
            case SnippetLabel::description: ++c.description; break;
            case SnippetLabel::other: ++c.other; break;
            case SnippetLabel::undecided: ++c.undecided; break;
        }
        snippets.push_back(std::move(snip));
    }
    if (counts) *counts = c;
    return snippets;
}

std::vector<TrainPair> training_pairs(const std::vector<LabeledSnippet>& snippets) {
    std::vector<TrainPair> pairs;
    for (const auto& snip : snippets) {
        if (snip.label == SnippetLabel::undecided) continue;
        pairs.push_back(TrainPair{snip.text, snip.label == SnippetLabel::description ? 1 : 0});
    }
    return pairs;
}

EmbeddingTable load_embeddings(const std::string& path, std::optional<int> expected_dim) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open embeddings file: " + path);
    std::unordered_map<std::string, Eigen::VectorXd> vectors;
    int dim = expected_dim.value_or(0);
    std::string line;
    long long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (is_blank(line)) continue;
        std::size_t pos = line.find(' ');
        if (pos == std::string::npos || pos == 0) {
            throw Error("embeddings file line " + std::to_string(line_no) + ": no vector");
        }
        std::string token = line.substr(0, pos);
        std::vector<double> values;
        const char* p = line.data() + pos;
        const char* end = line.data() + line.size();
        while (p < end) {
            while (p < end && (*p == ' ' || *p == '\t' || *p == '\r')) ++p;
            if (p >= end) break;
            double v = 0.0;
            auto [next, ec] = std::from_chars(p, end, v);
            if (ec != std::errc{}) {
                throw Error("embeddings file line " + std::to_string(line_no) +
                            ": bad number near \"" + std::string(p, std::min<std::size_t>(8, end - p)) +
                            "\"");
            }
            values.push_back(v);
            p = next;
        }
        if (values.empty()) {
            throw Error("embeddings file line " + std::to_string(line_no) + ": no vector");
        }
        if (dim == 0) dim = static_cast<int>(values.size());
        if (static_cast<int>(values.size()) != dim) {
            throw Error("embeddings file line " + std::to_string(line_no) +
                        ": dimension " + std::to_string(values.size()) + " != " +
                        std::to_string(dim));
        }
        Eigen::VectorXd vec(dim);
        for (int k = 0; k < dim; ++k) vec[k] = values[k];
        vectors[std::move(token)] = std::move(vec);
    }
    if (dim == 0) throw Error("embeddings file is empty: " + path);
    return EmbeddingTable(dim, std::move(vectors));
}

std::string file_checksum(const std::string& path) {
    const std::string bytes = io::slurp_file(path);
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::vector<std::string> load_word_list(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open word list: " + path);
    std::vector<std::string> words;
    std::string line;
    while (std::getline(in, line)) {
        std::size_t b = 0, e = line.size();
        while (b < e && static_cast<unsigned char>(line[b]) <= ' ') ++b;
        while (e > b && static_cast<unsigned char>(line[e - 1]) <= ' ') --e;
        if (b == e || line[b] == '#') continue;
        words.emplace_back(line.substr(b, e - b));
    }
    return words;
}

void write_tagged_sentences(const std::string& path,
                            const std::vector<TaggedSentence>& sentences) {
    std::string out;
    for (const auto& s : sentences) {
        json j;
        j["tokens"] = json::array();
        j["labels"] = json::array();
        for (const auto& t : s.tokens) j["tokens"].push_back(t.surface);
        for (int label : s.labels) j["labels"].push_back(label == 1 ? "product" : "other");
        out += j.dump();
        out += '\n';
    }
    io::write_file(path, out);
}

std::vector<TaggedSentence> load_tagged_sentences(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open tagged sentences file: " + path);
    std::vector<TaggedSentence> sentences;
    std::string line;
    long long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (is_blank(line)) continue;
        json j = json::parse(line, nullptr, false);
        const std::string where = "tagged sentences line " + std::to_string(line_no);
        if (j.is_discarded() || !j.is_object() || !j.contains("tokens") || !j.contains("labels")) {
            throw Error(where + ": invalid record");
        }
        TaggedSentence ts;
        for (const auto& tok : j["tokens"]) {
            std::string surface = tok.get<std::string>();
            int len = static_cast<int>(text::char_len(surface));
            ts.tokens.push_back(text::Token{std::move(surface), len});
        }
        for (const auto& lab : j["labels"]) {
            const std::string s = lab.get<std::string>();
            if (s == "product")
                ts.labels.push_back(1);
            else if (s == "other")
                ts.labels.push_back(0);
            else
                throw Error(where + ": unknown token label \"" + s + "\"");
        }
        if (ts.tokens.empty() || ts.tokens.size() != ts.labels.size()) {
            throw Error(where + ": tokens and labels must be parallel and non-empty");
        }
        sentences.push_back(std::move(ts));
    }
    return sentences;
}

}  // namespace prodlex::data

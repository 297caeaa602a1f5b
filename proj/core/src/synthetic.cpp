#include "prodlex/synthetic.hpp"

#include <algorithm>
#include <cstdio>
#include <set>

#include <json.hpp>

#include "json_util.hpp"
#include "prodlex/error.hpp"
#include "prodlex/rng.hpp"
#include "prodlex/text.hpp"

namespace prodlex::synth {

namespace {

// Pseudo-words from alternating consonant/vowel inventories. Distinct
// inventories make the two families' character bigrams disjoint.
std::string make_word(Rng& rng, const std::string& consonants, const std::string& vowels,
                      int min_syllables, int max_syllables) {
    const int syllables = min_syllables +
                          static_cast<int>(rng.below(max_syllables - min_syllables + 1));
    std::string word;
    for (int s = 0; s < syllables; ++s) {
        word.push_back(consonants[rng.below(consonants.size())]);
        word.push_back(vowels[rng.below(vowels.size())]);
    }
    return word;
}

std::vector<std::string> unique_words(Rng& rng, const std::string& consonants,
                                      const std::string& vowels, int count, int min_syllables,
                                      int max_syllables) {
    std::set<std::string> seen;
    std::vector<std::string> words;
    while (static_cast<int>(words.size()) < count) {
        std::string w = make_word(rng, consonants, vowels, min_syllables, max_syllables);
        if (seen.insert(w).second) words.push_back(std::move(w));
    }
    return words;
}

}  // namespace

DescCorpus make_desc_corpus(std::uint64_t seed, int per_class, int vocab_size) {
    Rng rng(seed);
    DescCorpus corpus;
    corpus.description_vocab = unique_words(rng, "bdfgh", "aou", vocab_size, 2, 3);
    corpus.other_vocab = unique_words(rng, "klmnp", "ei", vocab_size, 2, 3);

    auto make_snippets = [&](const std::vector<std::string>& vocab, int label) {
        for (int i = 0; i < per_class; ++i) {
            const int length = 10 + static_cast<int>(rng.below(21));  // 10..30 words
            std::string snippet;
            for (int w = 0; w < length; ++w) {
                if (w > 0) snippet.push_back(' ');
                snippet += vocab[rng.below(vocab.size())];
            }
            corpus.pairs.push_back(data::TrainPair{std::move(snippet), label});
        }
    };
    make_snippets(corpus.description_vocab, 1);
    make_snippets(corpus.other_vocab, 0);
    return corpus;
}

NameFamilies make_name_families(std::uint64_t seed, int per_family) {
    Rng rng(seed);
    NameFamilies families;
    families.positives = unique_words(rng, "bdglm", "aou", per_family, 2, 4);
    families.negatives = unique_words(rng, "fkprst", "ei", per_family, 2, 4);
    return families;
}

TaggerCorpus make_tagger_corpus(std::uint64_t seed, int n_sentences, int embedding_dim) {
    Rng rng(seed);
    TaggerCorpus corpus;

    const std::vector<std::string> determiners = {"the", "our", "this"};
    const std::vector<std::string> nouns = {"armchair", "table", "sofa",  "desk",    "shelf",
                                            "lamp",     "chair", "bed",   "cabinet", "stool"};
    const std::vector<std::string> adjectives = {"unique",  "handmade", "elegant", "sturdy",
                                                 "modern",  "compact",  "timeless", "solid",
                                                 "natural", "comfortable"};
    const std::vector<std::string> verbs = {"is", "feels", "looks", "stays"};
    const std::vector<std::string> fillers = {"and", "with", "in", "finish", "wood",
                                              "style", "comfort", "fibres", "design", "detail"};

    // Fantasy names use their own inventory so they never collide with the
    // embedding vocabulary.
    corpus.fantasy_words = unique_words(rng, "vzrwj", "oua", std::max(50, n_sentences / 3), 3, 4);

    auto pick = [&rng](const std::vector<std::string>& pool) -> const std::string& {
        return pool[rng.below(pool.size())];
    };

    for (int i = 0; i < n_sentences; ++i) {
        const std::string& det = pick(determiners);
        const std::string& fantasy = pick(corpus.fantasy_words);
        const std::string& noun = pick(nouns);
        data::TaggedSentence sent;
        auto push = [&sent](const std::string& word, int label) {
            sent.tokens.push_back(
                text::Token{word, static_cast<int>(text::char_len(word))});
            sent.labels.push_back(label);
        };
        push(det, 0);
        push(fantasy, 1);
        push(noun, 0);
        switch (rng.below(3)) {
            case 0:
                push(pick(verbs), 0);
                push(pick(adjectives), 0);
                break;
            case 1:
                push(pick(verbs), 0);
                push(pick(adjectives), 0);
                push("and", 0);
                push(pick(adjectives), 0);
                break;
            default:
                push("comes", 0);
                push("with", 0);
                push(pick(fillers), 0);
                push(pick(fillers), 0);
                break;
        }
        corpus.sentences.push_back(std::move(sent));
    }

    std::set<std::string> vocab;
    for (const auto& pool : {determiners, nouns, adjectives, verbs, fillers}) {
        vocab.insert(pool.begin(), pool.end());
    }
    vocab.insert("comes");
    std::unordered_map<std::string, Eigen::VectorXd> vectors;
    for (const auto& word : vocab) {
        Eigen::VectorXd v(embedding_dim);
        for (int k = 0; k < embedding_dim; ++k) v[k] = rng.uniform(-0.5, 0.5);
        vectors[word] = std::move(v);
    }
    corpus.embeddings = data::EmbeddingTable(embedding_dim, std::move(vectors));
    return corpus;
}

void write_snippets_file(const std::string& path, const std::vector<data::TrainPair>& pairs,
                         const std::string& manufacturer) {
    std::string out;
    for (const auto& pair : pairs) {
        nlohmann::json j = {{"text", pair.text},
                            {"label", pair.label == 1 ? "description" : "other"},
                            {"manufacturer", manufacturer}};
        out += j.dump();
        out += '\n';
    }
    io::write_file(path, out);
}

void write_embeddings_file(const std::string& path, const data::EmbeddingTable& table) {
    std::vector<std::string> tokens;
    tokens.reserve(table.size());
    for (const auto& [token, vec] : table.vectors()) tokens.push_back(token);
    std::sort(tokens.begin(), tokens.end());
    std::string out;
    char buf[64];
    for (const auto& token : tokens) {
        out += token;
        const Eigen::VectorXd& vec = table.lookup(token);
        for (Eigen::Index k = 0; k < vec.size(); ++k) {
            std::snprintf(buf, sizeof(buf), " %.17g", vec[k]);
            out += buf;
        }
        out += '\n';
    }
    io::write_file(path, out);
}

void write_word_list(const std::string& path, const std::vector<std::string>& words) {
    std::string out;
    for (const auto& w : words) {
        out += w;
        out += '\n';
    }
    io::write_file(path, out);
}

}  // namespace prodlex::synth

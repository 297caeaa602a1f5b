#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "prodlex/datasets.hpp"

namespace prodlex::synth {

/// Labeled snippets built from two disjoint 50-word vocabularies; snippets
/// are 10-30 words long. Used as the desk-scale stand-in for a hand-labeled
/// description corpus.
struct DescCorpus {
    std::vector<data::TrainPair> pairs;  // label 1 = description-vocabulary snippet
    std::vector<std::string> description_vocab;
    std::vector<std::string> other_vocab;
};
DescCorpus make_desc_corpus(std::uint64_t seed, int per_class = 200, int vocab_size = 50);

/// Two name families drawn from disjoint character-bigram distributions,
/// mimicking product-name lists vs out-of-domain name lists.
struct NameFamilies {
    std::vector<std::string> positives;
    std::vector<std::string> negatives;
};
NameFamilies make_name_families(std::uint64_t seed, int per_family = 300);

/// Templated sentences ("the <fantasy> <noun> is <adjective>." and friends)
/// where the fantasy token is out of the embedding vocabulary and always
/// precedes a furniture noun. The embedding table covers every non-fantasy
/// word, so fantasy tokens embed to the all-zeros vector.
struct TaggerCorpus {
    std::vector<data::TaggedSentence> sentences;
    data::EmbeddingTable embeddings;
    std::vector<std::string> fantasy_words;
};
TaggerCorpus make_tagger_corpus(std::uint64_t seed, int n_sentences = 500,
                                int embedding_dim = 50);

/// Writes pairs in the snippets JSONL schema (label description/other).
void write_snippets_file(const std::string& path, const std::vector<data::TrainPair>& pairs,
                         const std::string& manufacturer = "synthetic");

/// Writes a table in the GloVe text format with round-trip precision.
void write_embeddings_file(const std::string& path, const data::EmbeddingTable& table);

/// Writes one word per line.
void write_word_list(const std::string& path, const std::vector<std::string>& words);

}  // namespace prodlex::synth

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "cbd/matrix.hpp"
#include "cbd/textprep.hpp"

namespace cbd {

// Document-frequency-ranked token index. Selection keeps the max_features
// tokens with the highest document frequency, ties broken by lexicographic
// token order; indices follow that ranking.
struct Vocabulary {
    std::unordered_map<std::string, std::uint32_t> token_to_index;
    std::vector<std::string> index_to_token;
    std::vector<std::uint32_t> doc_freq;  // by index, counts documents
    std::size_t max_features = 13000;

    std::size_t size() const { return index_to_token.size(); }
    std::optional<std::uint32_t> index_of(const std::string& token) const {
        auto it = token_to_index.find(token);
        if (it == token_to_index.end()) return std::nullopt;
        return it->second;
    }
};

struct TfidfModel {
    Vocabulary vocabulary;
    std::vector<double> idf;   // ln((1 + N) / (1 + df)) + 1, by index
    std::size_t corpus_size = 0;
};

// Fixed-length token index row. Index 0 is padding, 1 is unknown; vocabulary
// token v maps to index_of(v) + 2.
struct SequenceEncoding {
    static constexpr std::int32_t kPad = 0;
    static constexpr std::int32_t kUnknown = 1;

    std::vector<std::int32_t> indices;
    std::size_t valid_length = 0;  // positions before tail padding
};

struct EmbeddingTable {
    std::size_t dim = 0;
    std::unordered_map<std::string, std::vector<double>> vectors;
    std::string source_name;

    // Zero vector for tokens the table does not know.
    std::vector<double> lookup(const std::string& token) const {
        auto it = vectors.find(token);
        if (it == vectors.end()) return std::vector<double>(dim, 0.0);
        return it->second;
    }
};

Vocabulary build_vocabulary(const std::vector<TokenSequence>& docs, std::size_t max_features);

TfidfModel fit_tfidf(const std::vector<TokenSequence>& docs, std::size_t max_features);

// tf = raw count, weighted by idf, each nonzero row L2-normalized.
// Out-of-vocabulary tokens are ignored.
SparseMatrix tfidf_transform(const std::vector<TokenSequence>& docs, const TfidfModel& model);

SequenceEncoding encode_sequence(const TokenSequence& tokens, const Vocabulary& vocab,
                                 std::size_t sequence_length);

// Word-per-line text format: token followed by dim floats. A leading
// `count dim` line is skipped when its second field equals expected_dim.
EmbeddingTable load_embeddings(const std::string& path, std::size_t expected_dim);

// Rows indexed like SequenceEncoding: row 0 (pad) and row 1 (unknown) are
// zero, row i + 2 is the embedding of vocabulary token i.
Matrix embedding_matrix_for_vocab(const Vocabulary& vocab, const EmbeddingTable& table);

Matrix embed_with_matrix(const SequenceEncoding& encoding, const Matrix& embedding_matrix);

// sequence_length x dim input for the neural models.
Matrix embed_sequence(const SequenceEncoding& encoding, const Vocabulary& vocab,
                      const EmbeddingTable& table);

}  // namespace cbd

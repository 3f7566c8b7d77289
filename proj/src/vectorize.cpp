#include "cbd/vectorize.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace cbd {

Vocabulary build_vocabulary(const std::vector<TokenSequence>& docs, std::size_t max_features) {
    if (docs.empty()) throw std::invalid_argument("build_vocabulary: no documents");

    std::unordered_map<std::string, std::uint32_t> df;
    std::vector<std::string> seen_in_doc;
    for (const auto& doc : docs) {
        seen_in_doc.clear();
        seen_in_doc.assign(doc.begin(), doc.end());
        std::sort(seen_in_doc.begin(), seen_in_doc.end());
        seen_in_doc.erase(std::unique(seen_in_doc.begin(), seen_in_doc.end()), seen_in_doc.end());
        for (const auto& token : seen_in_doc) ++df[token];
    }

    std::vector<std::pair<std::string, std::uint32_t>> ranked(df.begin(), df.end());
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    if (ranked.size() > max_features) ranked.resize(max_features);

    Vocabulary vocab;
    vocab.max_features = max_features;
    vocab.index_to_token.reserve(ranked.size());
    vocab.doc_freq.reserve(ranked.size());
    for (std::uint32_t i = 0; i < ranked.size(); ++i) {
        vocab.token_to_index.emplace(ranked[i].first, i);
        vocab.index_to_token.push_back(ranked[i].first);
        vocab.doc_freq.push_back(ranked[i].second);
    }
    return vocab;
}

TfidfModel fit_tfidf(const std::vector<TokenSequence>& docs, std::size_t max_features) {
    TfidfModel model;
    model.vocabulary = build_vocabulary(docs, max_features);
    model.corpus_size = docs.size();
    const double n = static_cast<double>(docs.size());
    model.idf.reserve(model.vocabulary.size());
    for (std::uint32_t df : model.vocabulary.doc_freq)
        model.idf.push_back(std::log((1.0 + n) / (1.0 + static_cast<double>(df))) + 1.0);
    return model;
}

SparseMatrix tfidf_transform(const std::vector<TokenSequence>& docs, const TfidfModel& model) {
    SparseMatrix out;
    out.cols = model.vocabulary.size();
    out.rows.reserve(docs.size());
    std::map<std::uint32_t, std::uint32_t> counts;  // ordered: deterministic sums
    for (const auto& doc : docs) {
        counts.clear();
        for (const auto& token : doc)
            if (auto idx = model.vocabulary.index_of(token)) ++counts[*idx];

        SparseRow row;
        row.reserve(counts.size());
        double norm_sq = 0.0;
        for (const auto& [idx, tf] : counts) {
            const double value = static_cast<double>(tf) * model.idf[idx];
            row.emplace_back(idx, value);
            norm_sq += value * value;
        }
        if (norm_sq > 0.0) {
            const double inv_norm = 1.0 / std::sqrt(norm_sq);
            for (auto& [idx, value] : row) value *= inv_norm;
        }
        out.rows.push_back(std::move(row));
    }
    return out;
}

SequenceEncoding encode_sequence(const TokenSequence& tokens, const Vocabulary& vocab,
                                 std::size_t sequence_length) {
    SequenceEncoding encoding;
    encoding.indices.assign(sequence_length, SequenceEncoding::kPad);
    encoding.valid_length = std::min(tokens.size(), sequence_length);
    for (std::size_t i = 0; i < encoding.valid_length; ++i) {
        if (auto idx = vocab.index_of(tokens[i]))
            encoding.indices[i] = static_cast<std::int32_t>(*idx) + 2;
        else
            encoding.indices[i] = SequenceEncoding::kUnknown;
    }
    return encoding;
}

EmbeddingTable load_embeddings(const std::string& path, std::size_t expected_dim) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open embedding file: " + path);

    EmbeddingTable table;
    table.dim = expected_dim;
    table.source_name = path;

    std::string line;
    std::size_t line_no = 0;
    bool first = true;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;

        std::istringstream fields(line);
        std::string token;
        fields >> token;

        if (first) {
            first = false;
            // Some distributions start with a `count dim` line.
            std::string second;
            if (fields >> second && fields.eof()) {
                char* end = nullptr;
                const long dim_field = std::strtol(second.c_str(), &end, 10);
                bool token_numeric = !token.empty() &&
                    token.find_first_not_of("0123456789") == std::string::npos;
                if (token_numeric && end && *end == '\0' &&
                    dim_field == static_cast<long>(expected_dim))
                    continue;
            }
            fields.clear();
            fields.str(line);
            fields >> token;
        }

        std::vector<double> vec;
        vec.reserve(expected_dim);
        std::string value;
        while (fields >> value) {
            try {
                std::size_t consumed = 0;
                vec.push_back(std::stod(value, &consumed));
                if (consumed != value.size()) throw std::invalid_argument("trailing");
            } catch (const std::exception&) {
                throw std::runtime_error("line " + std::to_string(line_no) +
                                         ": unreadable float '" + value + "'");
            }
        }
        if (vec.size() != expected_dim)
            throw std::runtime_error("line " + std::to_string(line_no) + ": expected " +
                                     std::to_string(expected_dim) + " values, got " +
                                     std::to_string(vec.size()));
        table.vectors.try_emplace(std::move(token), std::move(vec));  // first occurrence wins
    }
    return table;
}

Matrix embedding_matrix_for_vocab(const Vocabulary& vocab, const EmbeddingTable& table) {
    Matrix m(vocab.size() + 2, table.dim);  // rows 0 and 1 stay zero
    for (std::size_t i = 0; i < vocab.size(); ++i) {
        auto it = table.vectors.find(vocab.index_to_token[i]);
        if (it == table.vectors.end()) continue;
        for (std::size_t d = 0; d < table.dim; ++d) m(i + 2, d) = it->second[d];
    }
    return m;
}

Matrix embed_with_matrix(const SequenceEncoding& encoding, const Matrix& embedding_matrix) {
    Matrix out(encoding.indices.size(), embedding_matrix.cols());
    for (std::size_t i = 0; i < encoding.indices.size(); ++i) {
        const auto idx = static_cast<std::size_t>(encoding.indices[i]);
        for (std::size_t d = 0; d < embedding_matrix.cols(); ++d)
            out(i, d) = embedding_matrix(idx, d);
    }
    return out;
}

Matrix embed_sequence(const SequenceEncoding& encoding, const Vocabulary& vocab,
                      const EmbeddingTable& table) {
    return embed_with_matrix(encoding, embedding_matrix_for_vocab(vocab, table));
}

}  // namespace cbd

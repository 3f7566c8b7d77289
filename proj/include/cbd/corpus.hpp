#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace cbd {

struct Comment {
    std::string id;
    std::string text;
    std::optional<int> label;  // 0 = non-offensive, 1 = offensive
};

// An ordered, fully-labeled comment collection for one forum.
struct LabeledCorpus {
    std::string forum;
    std::vector<Comment> comments;

    std::size_t size() const { return comments.size(); }
    std::size_t count_label(int label) const;
    std::vector<int> labels() const;
};

struct CorpusStats {
    std::size_t total = 0;
    std::size_t count0 = 0;
    std::size_t count1 = 0;
    double pct0 = 0.0;      // rounded half-up to 2 decimals
    double pct1 = 0.0;
    double avg_len0 = 0.0;  // mean whitespace-token count of raw text
    double avg_len1 = 0.0;
};

struct FoldPlan {
    int k = 0;
    std::uint64_t seed = 0;
    std::vector<int> assignments;  // fold index per comment, in [0, k)
    std::vector<std::string> warnings;

    std::vector<std::size_t> test_indices(int fold) const;
    std::vector<std::size_t> train_indices(int fold) const;
};

// Reads the canonical CSV (`id,text,label` header, RFC-4180 quoting, UTF-8).
// Throws std::runtime_error naming the offending row on malformed input.
LabeledCorpus load_corpus(const std::string& path, const std::string& forum);

CorpusStats corpus_stats(const LabeledCorpus& corpus);

// Stratified assignment: each class is shuffled with the seed and dealt
// round-robin, the second class continuing where the first left off so that
// fold sizes and per-class counts both stay within 1 of each other.
FoldPlan make_stratified_folds(const LabeledCorpus& corpus, int k, std::uint64_t seed);

}  // namespace cbd

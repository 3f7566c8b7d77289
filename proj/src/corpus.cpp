#include "cbd/corpus.hpp"

#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "cbd/numeric.hpp"
#include "cbd/rng.hpp"

namespace cbd {

namespace {

// RFC-4180 record reader: quoted fields may contain commas, doubled quotes
// and line breaks. Returns false at end of input.
bool read_record(std::istream& in, std::vector<std::string>& fields) {
    fields.clear();
    if (in.peek() == EOF) return false;
    std::string field;
    bool in_quotes = false;
    bool started = false;
    int c;
    while ((c = in.get()) != EOF) {
        started = true;
        if (in_quotes) {
            if (c == '"') {
                if (in.peek() == '"') {
                    field.push_back('"');
                    in.get();
                } else {
                    in_quotes = false;
                }
            } else {
                field.push_back(static_cast<char>(c));
            }
        } else if (c == '"') {
            in_quotes = true;
        } else if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else if (c == '\r') {
            if (in.peek() == '\n') in.get();
            break;
        } else if (c == '\n') {
            break;
        } else {
            field.push_back(static_cast<char>(c));
        }
    }
    if (!started) return false;
    fields.push_back(std::move(field));
    return true;
}

int parse_label(const std::string& raw, std::size_t row) {
    std::string trimmed = raw;
    while (!trimmed.empty() && std::isspace(static_cast<unsigned char>(trimmed.back())))
        trimmed.pop_back();
    std::size_t pos = 0;
    while (pos < trimmed.size() && std::isspace(static_cast<unsigned char>(trimmed[pos]))) ++pos;
    trimmed.erase(0, pos);

    int value = 0;
    try {
        std::size_t consumed = 0;
        value = std::stoi(trimmed, &consumed);
        if (consumed != trimmed.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
        throw std::runtime_error("row " + std::to_string(row) + ": label is not an integer: '" +
                                 raw + "'");
    }
    if (value != 0 && value != 1)
        throw std::runtime_error("row " + std::to_string(row) + ": label must be 0 or 1, got " +
                                 std::to_string(value));
    return value;
}

}  // namespace

std::size_t LabeledCorpus::count_label(int label) const {
    std::size_t n = 0;
    for (const auto& c : comments)
        if (c.label == label) ++n;
    return n;
}

std::vector<int> LabeledCorpus::labels() const {
    std::vector<int> out;
    out.reserve(comments.size());
    for (const auto& c : comments) out.push_back(c.label.value());
    return out;
}

LabeledCorpus load_corpus(const std::string& path, const std::string& forum) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open corpus file: " + path);

    std::vector<std::string> fields;
    if (!read_record(in, fields))
        throw std::runtime_error(path + ": empty file");
    if (fields.size() != 3 || fields[0] != "id" || fields[1] != "text" || fields[2] != "label")
        throw std::runtime_error(path + ": header must be exactly 'id,text,label'");

    LabeledCorpus corpus;
    corpus.forum = forum;
    std::size_t row = 1;  // header is row 1
    while (read_record(in, fields)) {
        ++row;
        if (fields.size() == 1 && fields[0].empty()) continue;  // trailing blank line
        if (fields.size() != 3)
            throw std::runtime_error("row " + std::to_string(row) + ": expected 3 fields, got " +
                                     std::to_string(fields.size()));
        Comment comment;
        comment.id = fields[0];
        comment.text = fields[1];
        comment.label = parse_label(fields[2], row);
        corpus.comments.push_back(std::move(comment));
    }
    if (corpus.comments.empty()) throw std::runtime_error(path + ": empty corpus");
    return corpus;
}

CorpusStats corpus_stats(const LabeledCorpus& corpus) {
    CorpusStats stats;
    stats.total = corpus.size();
    std::size_t words0 = 0;
    std::size_t words1 = 0;
    for (const auto& comment : corpus.comments) {
        // Word count of the raw text: whitespace-separated runs.
        std::size_t words = 0;
        bool in_word = false;
        for (unsigned char c : comment.text) {
            if (std::isspace(c)) {
                in_word = false;
            } else if (!in_word) {
                in_word = true;
                ++words;
            }
        }
        if (comment.label.value() == 0) {
            ++stats.count0;
            words0 += words;
        } else {
            ++stats.count1;
            words1 += words;
        }
    }
    stats.pct0 = round_half_up(100.0 * static_cast<double>(stats.count0) /
                               static_cast<double>(stats.total), 2);
    stats.pct1 = round_half_up(100.0 * static_cast<double>(stats.count1) /
                               static_cast<double>(stats.total), 2);
    stats.avg_len0 = stats.count0 ? static_cast<double>(words0) / static_cast<double>(stats.count0) : 0.0;
    stats.avg_len1 = stats.count1 ? static_cast<double>(words1) / static_cast<double>(stats.count1) : 0.0;
    return stats;
}

FoldPlan make_stratified_folds(const LabeledCorpus& corpus, int k, std::uint64_t seed) {
    if (k < 2) throw std::invalid_argument("fold count must be at least 2");
    const std::size_t n0 = corpus.count_label(0);
    const std::size_t n1 = corpus.count_label(1);
    if (n0 == 0 || n1 == 0)
        throw std::invalid_argument("stratified folds need at least one comment per class");

    FoldPlan plan;
    plan.k = k;
    plan.seed = seed;
    plan.assignments.assign(corpus.size(), -1);
    for (int label : {0, 1}) {
        const std::size_t count = label == 0 ? n0 : n1;
        if (count < static_cast<std::size_t>(k))
            plan.warnings.push_back("class " + std::to_string(label) + " has only " +
                                    std::to_string(count) + " comments for k=" + std::to_string(k) +
                                    "; some folds get none");
    }

    std::vector<std::size_t> by_class[2];
    for (std::size_t i = 0; i < corpus.size(); ++i)
        by_class[corpus.comments[i].label.value()].push_back(i);

    Rng rng(seed);
    std::size_t dealt = 0;
    for (auto& members : by_class) {
        rng.shuffle(members);
        // Continue dealing where the previous class stopped so fold sizes
        // stay within 1 overall, not just per class.
        for (std::size_t p = 0; p < members.size(); ++p)
            plan.assignments[members[p]] = static_cast<int>((p + dealt) % static_cast<std::size_t>(k));
        dealt += members.size();
    }
    return plan;
}

std::vector<std::size_t> FoldPlan::test_indices(int fold) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < assignments.size(); ++i)
        if (assignments[i] == fold) out.push_back(i);
    return out;
}

std::vector<std::size_t> FoldPlan::train_indices(int fold) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < assignments.size(); ++i)
        if (assignments[i] != fold) out.push_back(i);
    return out;
}

}  // namespace cbd

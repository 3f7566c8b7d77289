#include "cbd/textprep.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace cbd {

namespace {

bool is_ascii_letter(unsigned char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

}  // namespace

std::string strip_specials(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    bool pending_space = false;
    for (unsigned char c : text) {
        if (is_ascii_letter(c) || c == '*') {
            if (pending_space && !out.empty()) out.push_back(' ');
            pending_space = false;
            out.push_back(static_cast<char>(c));
        } else {
            // Whitespace and every special character alike become one space.
            pending_space = true;
        }
    }
    return out;
}

TokenSequence tokenize(const std::string& text) {
    TokenSequence tokens;
    std::string current;
    for (unsigned char c : text) {
        if (std::isspace(c)) {
            if (!current.empty()) tokens.push_back(std::move(current));
            current.clear();
        } else {
            current.push_back(static_cast<char>(c));
        }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

TokenSequence to_lowercase(TokenSequence tokens) {
    for (auto& token : tokens)
        std::transform(token.begin(), token.end(), token.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return tokens;
}

TokenSequence mask_censored(TokenSequence tokens) {
    for (auto& token : tokens)
        if (token.find('*') != std::string::npos) token = "beep";
    return tokens;
}

TokenSequence remove_stopwords(TokenSequence tokens, const PreprocessConfig& config) {
    TokenSequence kept;
    kept.reserve(tokens.size());
    for (auto& token : tokens)
        if (!config.stopwords.contains(token)) kept.push_back(std::move(token));
    return kept;
}

TokenSequence stem(TokenSequence tokens) {
    for (auto& token : tokens) token = porter_stem(token);
    return tokens;
}

TokenSequence preprocess_pipeline(const std::string& text, const PreprocessConfig& config) {
    TokenSequence tokens = tokenize(strip_specials(text));
    if (config.lowercase) tokens = to_lowercase(std::move(tokens));
    if (config.keep_asterisk_masking) tokens = mask_censored(std::move(tokens));
    tokens = remove_stopwords(std::move(tokens), config);
    if (config.enable_stemming) tokens = stem(std::move(tokens));
    return tokens;
}

std::unordered_set<std::string> load_stopword_list(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open stopword list: " + path);
    std::unordered_set<std::string> words;
    std::string line;
    while (std::getline(in, line)) {
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream fields(line);
        std::string word;
        while (fields >> word) words.insert(word);
    }
    return words;
}

}  // namespace cbd

#pragma once

#include <string>
#include <unordered_set>
#include <vector>

namespace cbd {

using TokenSequence = std::vector<std::string>;

// Built-in English stopword list (lowercase, includes the split fragments of
// apostrophe forms since apostrophes are stripped before this stage runs).
const std::vector<std::string>& default_stopwords();

// One token per line, '#' starts a comment, blank lines ignored.
std::unordered_set<std::string> load_stopword_list(const std::string& path);

struct PreprocessConfig {
    bool keep_asterisk_masking = true;
    bool lowercase = true;
    std::unordered_set<std::string> stopwords{default_stopwords().begin(),
                                              default_stopwords().end()};
    bool enable_stemming = false;
};

// Replaces every character other than ASCII letters and '*' with a space,
// collapses space runs and trims the ends.
std::string strip_specials(const std::string& text);

// Splits on whitespace, dropping empty tokens.
TokenSequence tokenize(const std::string& text);

TokenSequence to_lowercase(TokenSequence tokens);

// Any token containing '*' becomes the literal token "beep".
TokenSequence mask_censored(TokenSequence tokens);

TokenSequence remove_stopwords(TokenSequence tokens, const PreprocessConfig& config);

// Classic Porter (1980) stem; words of length <= 2 are returned unchanged.
// Expects a lowercase ASCII word.
std::string porter_stem(const std::string& word);

TokenSequence stem(TokenSequence tokens);

// strip -> tokenize -> lowercase -> mask -> stopwords -> (stem), in order.
TokenSequence preprocess_pipeline(const std::string& text, const PreprocessConfig& config);

}  // namespace cbd

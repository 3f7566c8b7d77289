#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <numeric>

#include "cbd/rng.hpp"
#include "cbd/textprep.hpp"

using namespace cbd;

namespace {

std::string join(const TokenSequence& tokens) {
    std::string out;
    for (const auto& t : tokens) {
        if (!out.empty()) out.push_back(' ');
        out += t;
    }
    return out;
}

// Random printable-ish text with plenty of specials, for property tests.
std::string random_text(Rng& rng) {
    static const std::string alphabet =
        "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789 *!#.,'?\t\n-@";
    std::string text;
    const std::size_t len = rng.uniform_index(60);
    for (std::size_t i = 0; i < len; ++i) text.push_back(alphabet[rng.uniform_index(alphabet.size())]);
    return text;
}

}  // namespace

TEST_CASE("strip_specials keeps letters, spaces and asterisks") {
    CHECK(strip_specials("Rest in pieces. fk u") == "Rest in pieces fk u");
    CHECK(strip_specials("abc") == "abc");
    CHECK(strip_specials("s**t!! #1") == "s**t");
    CHECK(strip_specials("") == "");
    CHECK(strip_specials("!!!") == "");
    CHECK(strip_specials("a,b") == "a b");
    CHECK(strip_specials("  hi  there  ") == "hi there");
}

TEST_CASE("strip_specials output alphabet property") {
    Rng rng(7);
    for (int i = 0; i < 300; ++i) {
        const std::string out = strip_specials(random_text(rng));
        for (unsigned char c : out) {
            const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == ' ' || c == '*';
            CHECK(ok);
        }
        CHECK(out.find("  ") == std::string::npos);
        if (!out.empty()) {
            CHECK(out.front() != ' ');
            CHECK(out.back() != ' ');
        }
    }
}

TEST_CASE("tokenize splits on whitespace") {
    CHECK(tokenize("We can only hope") == TokenSequence{"We", "can", "only", "hope"});
    CHECK(tokenize("") == TokenSequence{});
    CHECK(tokenize("a  b\tc") == TokenSequence{"a", "b", "c"});
    CHECK(tokenize(" \t\n ") == TokenSequence{});
}

TEST_CASE("mask_censored replaces starred tokens with beep") {
    CHECK(mask_censored({"s**t"}) == TokenSequence{"beep"});
    CHECK(mask_censored({"hope"}) == TokenSequence{"hope"});
    CHECK(mask_censored({"f***", "you", "**"}) == TokenSequence{"beep", "you", "beep"});
}

TEST_CASE("mask_censored preserves sequence length") {
    Rng rng(11);
    for (int i = 0; i < 200; ++i) {
        const TokenSequence tokens = tokenize(strip_specials(random_text(rng)));
        CHECK(mask_censored(tokens).size() == tokens.size());
    }
}

TEST_CASE("remove_stopwords drops configured tokens in order") {
    PreprocessConfig config;
    CHECK(remove_stopwords({"the", "game", "in", "a", "mess"}, config) ==
          TokenSequence{"game", "mess"});
    CHECK(remove_stopwords({}, config) == TokenSequence{});
    CHECK(remove_stopwords({"an", "an"}, config) == TokenSequence{});
}

TEST_CASE("default stopword list includes the paper's examples") {
    PreprocessConfig config;
    for (const char* w : {"the", "in", "a", "an"}) CHECK(config.stopwords.contains(w));
    for (const auto& w : default_stopwords()) {
        CHECK(!w.empty());
        CHECK(std::all_of(w.begin(), w.end(), [](char c) { return c >= 'a' && c <= 'z'; }));
    }
}

TEST_CASE("default stopword list matches the shipped asset") {
    const auto from_file =
        load_stopword_list(std::string(CBDETECT_SOURCE_DIR) + "/assets/stopwords_en.txt");
    const auto& built_in = default_stopwords();
    CHECK(from_file.size() == built_in.size());
    for (const auto& w : built_in) CHECK(from_file.contains(w));
}

TEST_CASE("porter stemmer matches the classic algorithm") {
    // The error-analysis vocabulary.
    CHECK(porter_stem("previous") == "previou");
    CHECK(porter_stem("minutes") == "minut");
    CHECK(porter_stem("run") == "run");
    // Classic vectors.
    CHECK(porter_stem("caresses") == "caress");
    CHECK(porter_stem("ponies") == "poni");
    CHECK(porter_stem("ties") == "ti");
    CHECK(porter_stem("cats") == "cat");
    CHECK(porter_stem("feed") == "feed");
    CHECK(porter_stem("agreed") == "agree");
    CHECK(porter_stem("plastered") == "plaster");
    CHECK(porter_stem("motoring") == "motor");
    CHECK(porter_stem("sing") == "sing");
    CHECK(porter_stem("conflated") == "conflat");
    CHECK(porter_stem("troubled") == "troubl");
    CHECK(porter_stem("sized") == "size");
    CHECK(porter_stem("hopping") == "hop");
    CHECK(porter_stem("falling") == "fall");
    CHECK(porter_stem("hissing") == "hiss");
    CHECK(porter_stem("filing") == "file");
    CHECK(porter_stem("happy") == "happi");
    CHECK(porter_stem("sky") == "sky");
    CHECK(porter_stem("relational") == "relat");
    CHECK(porter_stem("conditional") == "condit");
    CHECK(porter_stem("generalization") == "gener");
    CHECK(porter_stem("oscillators") == "oscil");
    CHECK(porter_stem("controlling") == "control");
    // Length <= 2 unchanged.
    CHECK(porter_stem("is") == "is");
    CHECK(porter_stem("a") == "a");
}

TEST_CASE("preprocess_pipeline runs the stages in order") {
    PreprocessConfig config;
    CHECK(preprocess_pipeline("This is why we don't account share children.", config) ==
          TokenSequence{"account", "share", "children"});
    CHECK(preprocess_pipeline("***", config) == TokenSequence{"beep"});
    CHECK(preprocess_pipeline("", config) == TokenSequence{});
    CHECK(preprocess_pipeline("Rest in pieces. fk u", config) ==
          TokenSequence{"rest", "pieces", "fk", "u"});
    CHECK(preprocess_pipeline("S**t!! happens", config) == TokenSequence{"beep", "happens"});
}

TEST_CASE("preprocess_pipeline with stemming enabled") {
    PreprocessConfig config;
    config.enable_stemming = true;
    CHECK(preprocess_pipeline("previous minutes", config) == TokenSequence{"previou", "minut"});
}

TEST_CASE("pipeline output tokens are lowercase letters only") {
    PreprocessConfig config;
    Rng rng(23);
    for (int i = 0; i < 300; ++i) {
        for (const auto& token : preprocess_pipeline(random_text(rng), config)) {
            CHECK(!token.empty());
            CHECK(std::all_of(token.begin(), token.end(),
                              [](char c) { return c >= 'a' && c <= 'z'; }));
        }
    }
}

TEST_CASE("preprocess_pipeline is idempotent without stemming") {
    PreprocessConfig config;
    Rng rng(31);
    for (int i = 0; i < 200; ++i) {
        const std::string text = random_text(rng);
        const TokenSequence once = preprocess_pipeline(text, config);
        CHECK(preprocess_pipeline(join(once), config) == once);
    }
}

TEST_CASE("load_stopword_list honors comments and blank lines") {
    const std::string path = "stopwords_test.txt";
    {
        std::ofstream out(path);
        out << "# comment line\n\nfoo\nbar # trailing comment\n";
    }
    const auto words = load_stopword_list(path);
    CHECK(words.size() == 2);
    CHECK(words.contains("foo"));
    CHECK(words.contains("bar"));
    CHECK(load_stopword_list(path).size() == 2);
    CHECK_THROWS(load_stopword_list("does_not_exist.txt"));
    std::remove(path.c_str());
}

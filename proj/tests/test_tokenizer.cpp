#include <random>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "seqlid/tokenizer.hpp"

using namespace seqlid;

namespace {

std::string join(const std::vector<Token>& tokens) {
    std::string text;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (i > 0) text += ' ';
        text += tokens[i];
    }
    return text;
}

// code points = bytes that are not UTF-8 continuation bytes
std::size_t codepoints(const std::string& s) {
    std::size_t n = 0;
    for (const char c : s)
        if ((static_cast<unsigned char>(c) & 0xC0) != 0x80) ++n;
    return n;
}

}  // namespace

TEST_CASE("word tokenize splits on whitespace runs and keeps everything else") {
    CHECK(word_tokenize("").empty());
    CHECK(word_tokenize("The dog.") == std::vector<Token>{"The", "dog."});
    CHECK(word_tokenize("a  b\tc") == std::vector<Token>{"a", "b", "c"});
    CHECK(word_tokenize("  \t\n ").empty());
    CHECK(word_tokenize(" x ") == std::vector<Token>{"x"});
    // NBSP and em-space are whitespace too
    CHECK(word_tokenize("a\xC2\xA0""b\xE2\x80\x83""c") == std::vector<Token>{"a", "b", "c"});
}

TEST_CASE("word tokenize is idempotent through a single-space join") {
    const std::vector<std::string> samples = {
        "The dog.",
        "a  b\tc",
        "  leading and trailing \n",
        "punc!? [x] (y) 100%",
        "caf\xC3\xA9 na\xC3\xAFve \xC5\xA0koda",
    };
    for (const auto& text : samples) {
        const auto once = word_tokenize(text);
        CHECK(word_tokenize(join(once)) == once);
    }
}

TEST_CASE("shape encode maps characters through the shape classes") {
    CHECK(shape_encode("The") == std::vector<Token>{"Aax"});
    CHECK(shape_encode("dog") == std::vector<Token>{"axg"});
    CHECK(shape_encode("A1 b!") == std::vector<Token>{"A0", "a."});
    CHECK(shape_encode("itchy lips") == std::vector<Token>{"iaxag", "aigx"});
    CHECK(shape_encode("Quick, jump!") == std::vector<Token>{"Axixa.", "gxxg."});
}

TEST_CASE("shape encode folds accented Latin letters to their base class") {
    CHECK(shape_encode("caf\xC3\xA9") == std::vector<Token>{"xxax"});       // cafe'
    CHECK(shape_encode("\xC3\x84rger") == std::vector<Token>{"Axgxx"});     // A-umlaut
    CHECK(shape_encode("\xC4\x90uro") == std::vector<Token>{"Axxx"});       // D-stroke
    CHECK(shape_encode("\xC5\xBEivot") == std::vector<Token>{"xixxa"});     // z-caron
    CHECK(shape_encode("\xC8\x99tiu") == std::vector<Token>{"xaix"});       // s-comma
    // non-letters, symbols and unmapped scripts become '.'
    CHECK(shape_encode("3\xC3\x97""4") == std::vector<Token>{"0.0"});       // multiplication sign
    CHECK(shape_encode("\xE4\xB8\xAD") == std::vector<Token>{"."});
}

TEST_CASE("shape tokens preserve token count, length and alphabet") {
    const std::string pool =
        "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789.,;:!?()[]'\"-/&%$";
    const std::vector<std::string> extras = {"\xC3\xA9", "\xC3\xB1", "\xC3\x9F", "\xC5\x91",
                                             "\xE2\x82\xAC", "\xD0\xB4"};
    std::mt19937_64 rng(3);
    std::vector<std::string> words;
    std::string text;
    for (int i = 0; i < 2000; ++i) {
        std::string word;
        const std::size_t len = 1 + rng() % 10;
        for (std::size_t k = 0; k < len; ++k) {
            if (rng() % 8 == 0)
                word += extras[rng() % extras.size()];
            else
                word += pool[rng() % pool.size()];
        }
        words.push_back(word);
        if (!text.empty()) text += (rng() % 4 == 0) ? "\n" : " ";
        text += word;
    }

    const auto word_tokens = word_tokenize(text);
    const auto shape_tokens = shape_encode(text);
    REQUIRE(word_tokens.size() == words.size());
    REQUIRE(shape_tokens.size() == words.size());
    const std::set<char> alphabet = {'A', 'a', 'x', 'g', 'i', '0', '.'};
    for (std::size_t i = 0; i < words.size(); ++i) {
        CHECK(shape_tokens[i].size() == codepoints(word_tokens[i]));
        for (const char c : shape_tokens[i]) CHECK(alphabet.count(c) == 1);
    }
}

TEST_CASE("tokenizer modes parse and print") {
    CHECK(parse_tokenizer_mode("word") == TokenizerMode::word);
    CHECK(parse_tokenizer_mode("shape") == TokenizerMode::shape);
    CHECK(!parse_tokenizer_mode("lines").has_value());
    CHECK(std::string(to_string(TokenizerMode::shape)) == "shape");
    CHECK(tokenize("The dog", TokenizerMode::word) == std::vector<Token>{"The", "dog"});
    CHECK(tokenize("The dog", TokenizerMode::shape) == std::vector<Token>{"Aax", "axg"});
}

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace seqlid {

// A token is a non-empty run of non-whitespace characters.
using Token = std::string;

enum class TokenizerMode { word, shape };

inline const char* to_string(TokenizerMode mode) {
    return mode == TokenizerMode::word ? "word" : "shape";
}

inline std::optional<TokenizerMode> parse_tokenizer_mode(std::string_view name) {
    if (name == "word") return TokenizerMode::word;
    if (name == "shape") return TokenizerMode::shape;
    return std::nullopt;
}

namespace detail {

// Decodes one UTF-8 sequence starting at s[i] and advances i past it.
// Malformed bytes decode as U+FFFD and consume a single byte.
inline char32_t decode_utf8(std::string_view s, std::size_t& i) {
    const auto byte = [&](std::size_t k) { return static_cast<unsigned char>(s[k]); };
    const unsigned char b0 = byte(i);
    if (b0 < 0x80) {
        ++i;
        return b0;
    }
    auto is_cont = [&](std::size_t k) { return k < s.size() && (byte(k) & 0xC0) == 0x80; };
    if ((b0 & 0xE0) == 0xC0 && is_cont(i + 1)) {
        char32_t c = (static_cast<char32_t>(b0 & 0x1F) << 6) | (byte(i + 1) & 0x3F);
        i += 2;
        return c >= 0x80 ? c : 0xFFFD;
    }
    if ((b0 & 0xF0) == 0xE0 && is_cont(i + 1) && is_cont(i + 2)) {
        char32_t c = (static_cast<char32_t>(b0 & 0x0F) << 12) |
                     (static_cast<char32_t>(byte(i + 1) & 0x3F) << 6) | (byte(i + 2) & 0x3F);
        i += 3;
        return c >= 0x800 ? c : 0xFFFD;
    }
    if ((b0 & 0xF8) == 0xF0 && is_cont(i + 1) && is_cont(i + 2) && is_cont(i + 3)) {
        char32_t c = (static_cast<char32_t>(b0 & 0x07) << 18) |
                     (static_cast<char32_t>(byte(i + 1) & 0x3F) << 12) |
                     (static_cast<char32_t>(byte(i + 2) & 0x3F) << 6) | (byte(i + 3) & 0x3F);
        i += 4;
        return (c >= 0x10000 && c <= 0x10FFFF) ? c : 0xFFFD;
    }
    ++i;
    return 0xFFFD;
}

inline bool is_whitespace(char32_t c) {
    switch (c) {
        case 0x09: case 0x0A: case 0x0B: case 0x0C: case 0x0D:
        case 0x20: case 0x85: case 0xA0: case 0x1680:
        case 0x2028: case 0x2029: case 0x202F: case 0x205F: case 0x3000:
            return true;
        default:
            return c >= 0x2000 && c <= 0x200A;
    }
}

// Strips accents from the Latin letters that occur in European corpora,
// returning the base ASCII letter, or 0 when the character is not a letter
// we can classify. Case of the result matches the case of the input.
inline char latin_base_letter(char32_t c) {
    if (c < 0x80) {
        const bool upper = c >= 'A' && c <= 'Z';
        const bool lower = c >= 'a' && c <= 'z';
        return (upper || lower) ? static_cast<char>(c) : 0;
    }
    if (c >= 0xC0 && c <= 0xFF) {
        // Latin-1 Supplement letters; 0xD7 and 0xF7 are operators, not letters.
        static constexpr char table[0x40] = {
            'A', 'A', 'A', 'A', 'A', 'A', 'A', 'C',  // C0-C7
            'E', 'E', 'E', 'E', 'I', 'I', 'I', 'I',  // C8-CF
            'D', 'N', 'O', 'O', 'O', 'O', 'O', 0,    // D0-D7
            'O', 'U', 'U', 'U', 'U', 'Y', 'T', 's',  // D8-DF
            'a', 'a', 'a', 'a', 'a', 'a', 'a', 'c',  // E0-E7
            'e', 'e', 'e', 'e', 'i', 'i', 'i', 'i',  // E8-EF
            'd', 'n', 'o', 'o', 'o', 'o', 'o', 0,    // F0-F7
            'o', 'u', 'u', 'u', 'u', 'y', 'p', 'y',  // F8-FF
        };
        return table[c - 0xC0];
    }
    if (c >= 0x100 && c <= 0x17F) {
        // Latin Extended-A, one base letter per code point.
        static constexpr std::string_view table =
            "AaAaAa"        // 0100 A with macron/breve/ogonek
            "CcCcCcCc"      // 0106 C with acute/circumflex/dot/caron
            "DdDd"          // 010E D with caron/stroke
            "EeEeEeEeEe"    // 0112 E variants
            "GgGgGgGg"      // 011C G variants
            "HhHh"          // 0124 H variants
            "IiIiIiIiIi"    // 0128 I variants (incl. dotless i)
            "Ii"            // 0132 IJ ligature
            "Jj"            // 0134 J with circumflex
            "Kkk"           // 0136 K with cedilla, kra
            "LlLlLlLlLl"    // 0139 L variants
            "NnNnNnnNn"     // 0143 N variants, eng
            "OoOoOo"        // 014C O variants
            "Oo"            // 0152 OE ligature
            "RrRrRr"        // 0154 R variants
            "SsSsSsSs"      // 015A S variants
            "TtTtTt"        // 0162 T variants
            "UuUuUuUuUuUu"  // 0168 U variants
            "Ww"            // 0174 W with circumflex
            "YyY"           // 0176 Y variants
            "ZzZzZz"        // 0179 Z variants
            "s";            // 017F long s
        static_assert(table.size() == 0x80);
        return table[c - 0x100];
    }
    if (c >= 0x218 && c <= 0x21B) {
        // Romanian S/T with comma below.
        static constexpr char table[4] = {'S', 's', 'T', 't'};
        return table[c - 0x218];
    }
    return 0;
}

// Character shape classes: 'A' capital, 'a' ascender, 'g' descender,
// 'i' dotted i, 'x' plain x-height, '0' digit, '.' everything else.
inline char shape_code(char32_t c) {
    if (c >= '0' && c <= '9') return '0';
    const char base = latin_base_letter(c);
    if (base == 0) return '.';
    if (base >= 'A' && base <= 'Z') return 'A';
    switch (base) {
        case 'b': case 'd': case 'f': case 'h': case 'k': case 'l': case 't':
            return 'a';
        case 'g': case 'j': case 'p': case 'q': case 'y':
            return 'g';
        case 'i':
            return 'i';
        default:
            return 'x';
    }
}

}  // namespace detail

// Splits text into maximal non-whitespace runs, in order. No case folding,
// no punctuation stripping.
inline std::vector<Token> word_tokenize(std::string_view text) {
    std::vector<Token> tokens;
    std::size_t i = 0;
    std::size_t token_start = 0;
    bool in_token = false;
    while (i < text.size()) {
        const std::size_t at = i;
        const char32_t c = detail::decode_utf8(text, i);
        if (detail::is_whitespace(c)) {
            if (in_token) {
                tokens.emplace_back(text.substr(token_start, at - token_start));
                in_token = false;
            }
        } else if (!in_token) {
            token_start = at;
            in_token = true;
        }
    }
    if (in_token) tokens.emplace_back(text.substr(token_start));
    return tokens;
}

// Re-encodes each word as a word shape token, one shape code per character.
inline std::vector<Token> shape_encode(std::string_view text) {
    std::vector<Token> tokens = word_tokenize(text);
    for (Token& word : tokens) {
        std::string shape;
        std::size_t i = 0;
        while (i < word.size()) shape.push_back(detail::shape_code(detail::decode_utf8(word, i)));
        word = std::move(shape);
    }
    return tokens;
}

inline std::vector<Token> tokenize(std::string_view text, TokenizerMode mode) {
    return mode == TokenizerMode::word ? word_tokenize(text) : shape_encode(text);
}

}  // namespace seqlid

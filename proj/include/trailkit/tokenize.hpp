#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace trailkit {

/// A word character is an ASCII alphanumeric or any byte >= 0x80 (UTF-8
/// continuation/lead bytes stay inside their word). Everything else —
/// whitespace and punctuation — is a boundary.
constexpr bool is_word_char(unsigned char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
           (c >= '0' && c <= '9') || c >= 0x80;
}

constexpr char ascii_lower(char c) {
    return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}

/// Streams lowercased word tokens to `fn` without materializing a token
/// vector. Stops after `max_tokens` tokens (pass SIZE_MAX for no limit).
/// Returns the number of tokens emitted.
template <typename Fn>
size_t for_each_token(std::string_view text, size_t max_tokens, Fn&& fn) {
    size_t emitted = 0;
    size_t i = 0;
    const size_t n = text.size();
    std::string buf;
    while (i < n && emitted < max_tokens) {
        while (i < n && !is_word_char(static_cast<unsigned char>(text[i]))) ++i;
        if (i >= n) break;
        buf.clear();
        while (i < n && is_word_char(static_cast<unsigned char>(text[i]))) {
            buf.push_back(ascii_lower(text[i]));
            ++i;
        }
        fn(std::string_view(buf));
        ++emitted;
    }
    return emitted;
}

/// Lowercased word tokens of `text`, truncated to the first `window_words`.
inline std::vector<std::string> tokenize_window(std::string_view text, size_t window_words) {
    std::vector<std::string> out;
    for_each_token(text, window_words,
                   [&](std::string_view tok) { out.emplace_back(tok); });
    return out;
}

/// Total word count of `text` (no window).
inline size_t count_words(std::string_view text) {
    return for_each_token(text, static_cast<size_t>(-1), [](std::string_view) {});
}

}  // namespace trailkit

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

namespace forumqa::utf8 {

// Byte offset of the first invalid sequence, or nullopt when `text` is valid UTF-8.
std::optional<std::size_t> find_invalid(std::string_view text);

// Decodes one scalar value starting at `pos` and advances `pos`. Invalid bytes
// decode as U+FFFD and advance by one.
char32_t decode(std::string_view text, std::size_t& pos);

void append(std::string& out, char32_t cp);

// Number of Unicode scalar values in `text`.
std::size_t length(std::string_view text);

// Byte offset of the `char_index`-th scalar value; `char_index == length(text)`
// maps to text.size(). Returns nullopt when out of range.
std::optional<std::size_t> byte_offset(std::string_view text, std::size_t char_index);

// Character index of byte offset `byte`, which must sit on a sequence boundary.
std::size_t char_index(std::string_view text, std::size_t byte);

// Substring by character offsets [char_begin, char_end). Nullopt when out of range.
std::optional<std::string> substr(std::string_view text, std::size_t char_begin, std::size_t char_end);

bool is_space(char32_t cp);

// Punctuation and symbol code points treated as word separators.
bool is_punct(char32_t cp);

}  // namespace forumqa::utf8

#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace advpara::text {

// Number of Unicode scalar values in a UTF-8 string (continuation bytes skipped).
std::size_t char_length(std::string_view utf8);

std::string to_lower(std::string_view s);

std::string_view trim(std::string_view s);

// Splits on ASCII whitespace, keeping the original spelling of each piece.
std::vector<std::string> split_whitespace(std::string_view s);

// Lowercased word tokens: runs of alphanumerics, apostrophes, and non-ASCII bytes.
// Punctuation separates words and is dropped.
std::vector<std::string> words(std::string_view s);

std::string join(const std::vector<std::string>& parts, std::string_view sep = " ");

// Whitespace-token bigrams of a text, in order.
std::vector<std::pair<std::string, std::string>> bigrams(std::string_view s);

}  // namespace advpara::text

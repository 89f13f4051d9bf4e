#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace league::text {

std::string lower(std::string_view s);
std::string trim(std::string_view s);
std::string collapse_whitespace(std::string_view s);

// Splits on runs of non-alphanumeric characters, lowercased.
std::vector<std::string> tokenize(std::string_view s);

// Distinct tokens, order of first appearance.
std::vector<std::string> distinct_tokens(std::string_view s);

std::vector<std::string> split_lines(std::string_view s);

// Whitespace-delimited token count (the mock provider's token model).
long long count_tokens(std::string_view s);

// Keeps the first max_tokens whitespace-delimited tokens, appending a
// truncation marker when anything was cut.
std::string truncate_tokens(std::string_view s, long long max_tokens);

std::string sha256_hex(std::string_view data);

// Shortest decimal representation that parses back to the same double.
std::string format_double(double v);

std::string xml_unescape(std::string_view s);

bool contains_ci(std::string_view haystack, std::string_view needle);

}  // namespace league::text

#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

// Small text utilities shared by retrieval, labelling and the mock provider.
// Word characters are ASCII alphanumerics plus non-ASCII code points outside
// the U+2000..U+203F punctuation block, so "CRISPR–Cas" splits at the dash.
namespace agora::text {

std::string to_lower(std::string_view s);
std::string trim(std::string_view s);
std::string join(const std::vector<std::string>& parts, std::string_view sep);

/// Lowercased word tokens in textual order.
std::vector<std::string> tokenize(std::string_view s);

bool is_stopword(std::string_view lowered);

/// Up to `n` distinct non-stopword tokens of length >= 3, ranked by frequency
/// then first appearance.
std::vector<std::string> keywords(std::string_view s, std::size_t n);

/// Sentence split on '.', '!' or '?' followed by whitespace or end of text.
std::vector<std::string> split_sentences(std::string_view s);

/// First `max_words` whitespace-separated words of `s`.
std::string clip_words(std::string_view s, std::size_t max_words);
std::size_t word_count(std::string_view s);

std::size_t utf8_length(std::string_view s);
/// Prefix holding at most `max_code_points` code points; never splits a sequence.
std::string utf8_prefix(std::string_view s, std::size_t max_code_points);

}  // namespace agora::text

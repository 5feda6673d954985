#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace econet {

// Splits raw text into word tokens. Whitespace separates tokens and
// punctuation is split off as single-character tokens; apostrophes and
// hyphens inside a word stay attached ("sotheby's" is one token).
std::vector<std::string> tokenize(std::string_view text);

std::string to_lower(std::string_view s);

// Lowercased tokens, convenience for the corpus pipeline.
std::vector<std::string> tokenize_lower(std::string_view text);

// Rule-based sentence segmentation: a sentence ends at terminal
// punctuation (. ! ?) when the next non-space character starts a new
// sentence (uppercase letter, opening quote, or digit). Single-letter
// initials and a small abbreviation list do not end a sentence.
std::vector<std::string> split_sentences(std::string_view document);

// Documents are blank-line separated within a file.
std::vector<std::string> split_documents(std::string_view file_content);

}  // namespace econet

#include "econet/text.hpp"

#include <array>
#include <cctype>

namespace econet {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
bool is_upper(char c) { return std::isupper(static_cast<unsigned char>(c)) != 0; }
bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }
bool is_alnum(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

// Punctuation split off as its own token. Apostrophe and hyphen are
// handled separately so contractions and compounds survive.
bool is_break_punct(char c) {
  switch (c) {
    case '.': case ',': case ';': case ':': case '!': case '?':
    case '"': case '(': case ')': case '[': case ']': case '{': case '}':
    case '%': case '$': case '/': case '\\': case '*': case '+':
    case '<': case '>': case '=': case '|': case '#': case '&': case '@':
      return true;
    default:
      return false;
  }
}

bool keeps_inside_word(char c, std::string_view word_so_far) {
  if (c == '\'' || c == '-') return !word_so_far.empty();
  return false;
}

const std::array<std::string_view, 16> kAbbreviations = {
    "mr", "mrs", "ms", "dr", "st", "jr", "sr", "prof", "gen", "gov",
    "sen", "rep", "vs", "inc", "co", "corp"};

bool is_abbreviation(std::string_view word) {
  std::string lower;
  lower.reserve(word.size());
  for (char c : word) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  for (auto a : kAbbreviations)
    if (lower == a) return true;
  return false;
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string word;
  auto flush = [&] {
    if (!word.empty()) {
      tokens.push_back(word);
      word.clear();
    }
  };
  for (size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (is_space(c)) {
      flush();
    } else if (is_break_punct(c)) {
      flush();
      tokens.emplace_back(1, c);
    } else if (c == '\'' || c == '-') {
      // Attached only when surrounded by word characters.
      bool next_is_word = i + 1 < text.size() && is_alnum(text[i + 1]);
      if (keeps_inside_word(c, word) && (next_is_word || (c == '\'' && i + 1 < text.size() && (text[i + 1] == 's' || text[i + 1] == 't')))) {
        word.push_back(c);
      } else if (c == '\'' && keeps_inside_word(c, word) && i + 1 == text.size()) {
        word.push_back(c);
      } else {
        flush();
        tokens.emplace_back(1, c);
      }
    } else {
      word.push_back(c);
    }
  }
  flush();
  return tokens;
}

std::string to_lower(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  return out;
}

std::vector<std::string> tokenize_lower(std::string_view text) {
  auto tokens = tokenize(text);
  for (auto& t : tokens) t = to_lower(t);
  return tokens;
}

std::vector<std::string> split_sentences(std::string_view document) {
  std::vector<std::string> sentences;
  std::string current;
  size_t i = 0;
  const size_t n = document.size();
  auto flush = [&] {
    // Trim surrounding whitespace.
    size_t b = 0, e = current.size();
    while (b < e && is_space(current[b])) ++b;
    while (e > b && is_space(current[e - 1])) --e;
    if (e > b) sentences.push_back(current.substr(b, e - b));
    current.clear();
  };
  while (i < n) {
    char c = document[i];
    current.push_back(c == '\n' ? ' ' : c);
    if (c == '.' || c == '!' || c == '?') {
      // Absorb runs of terminal punctuation and closing quotes.
      size_t j = i + 1;
      while (j < n && (document[j] == '.' || document[j] == '!' || document[j] == '?' ||
                       document[j] == '"' || document[j] == '\'')) {
        current.push_back(document[j]);
        ++j;
      }
      if (c == '.') {
        // Find the word right before the period.
        size_t we = current.size();
        while (we > 0 && (current[we - 1] == '.' || current[we - 1] == '"' || current[we - 1] == '\'')) --we;
        size_t wb = we;
        while (wb > 0 && is_alnum(current[wb - 1])) --wb;
        std::string_view word(current.data() + wb, we - wb);
        bool initial = word.size() == 1 && is_upper(word[0]);
        bool has_inner_dot = wb > 0 && current[wb - 1] == '.';  // U.S. style
        if (initial || has_inner_dot || is_abbreviation(word)) {
          i = j;
          continue;
        }
      }
      // Capitalization heuristic on what follows.
      size_t k = j;
      while (k < n && is_space(document[k])) ++k;
      bool boundary;
      if (k >= n) {
        boundary = true;
      } else {
        char next = document[k];
        if (next == '"' || next == '\'' || next == '(') {
          size_t k2 = k + 1;
          while (k2 < n && (document[k2] == '"' || document[k2] == '\'' || document[k2] == '(')) ++k2;
          boundary = k2 < n && (is_upper(document[k2]) || is_digit(document[k2]));
        } else {
          boundary = is_upper(next) || is_digit(next);
        }
        boundary = boundary && k > j - 1 && k != j;  // require whitespace after the punctuation
      }
      if (boundary) flush();
      i = j;
      continue;
    }
    ++i;
  }
  flush();
  return sentences;
}

std::vector<std::string> split_documents(std::string_view file_content) {
  std::vector<std::string> docs;
  std::string current;
  size_t i = 0;
  auto flush = [&] {
    bool blank = true;
    for (char c : current)
      if (!is_space(c)) blank = false;
    if (!blank) docs.push_back(current);
    current.clear();
  };
  while (i < file_content.size()) {
    // A blank line (possibly with spaces) separates documents.
    size_t eol = file_content.find('\n', i);
    std::string_view line = file_content.substr(i, eol == std::string_view::npos ? std::string_view::npos : eol - i);
    bool blank = true;
    for (char c : line)
      if (!is_space(c)) blank = false;
    if (blank) {
      flush();
    } else {
      current.append(line);
      current.push_back('\n');
    }
    if (eol == std::string_view::npos) break;
    i = eol + 1;
  }
  flush();
  return docs;
}

}  // namespace econet

#pragma once

#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace econet {

// A matched temporal indicator over a token sequence. The span is
// [begin, end) in token indices; its length equals the indicator's word
// count. surface joins the matched tokens with single spaces.
struct IndicatorMatch {
  int begin = 0;
  int end = 0;
  std::string surface;
  std::string category;
  int category_id = -1;
  int lexicon_id = -1;
};

// The temporal indicator lexicon: ordered categories, each an ordered
// list of (possibly multi-word) lowercase indicator strings. Indicator
// ids are dense in [0, size()) following category order. Immutable after
// construction; safe for concurrent read-only use.
class TemporalLexicon {
 public:
  // The built-in seven-category, forty-indicator set.
  static TemporalLexicon load_default();

  // Loads "category<TAB>indicator" lines, '#' comments and blank lines
  // ignored. Categories appear in first-seen order.
  static TemporalLexicon load_file(const std::string& path);

  static TemporalLexicon from_entries(
      const std::vector<std::pair<std::string, std::vector<std::string>>>& categories);

  int category_count() const { return static_cast<int>(category_names_.size()); }
  int size() const { return static_cast<int>(entries_.size()); }
  const std::string& category_name(int category_id) const { return category_names_.at(category_id); }
  const std::vector<std::string>& category_members(int category_id) const { return members_.at(category_id); }

  // Canonical indicator string for a lexicon id.
  const std::string& indicator(int lexicon_id) const { return entries_.at(lexicon_id).text; }
  int indicator_category(int lexicon_id) const { return entries_.at(lexicon_id).category; }
  // Id of an exact (lowercase) indicator string, or -1.
  int id_of(std::string_view indicator_text) const;

  // All non-overlapping matches over word tokens, case-insensitive,
  // sorted by start index. Overlaps resolve longest-match-first, ties by
  // leftmost start.
  std::vector<IndicatorMatch> find_indicators(std::span<const std::string> tokens) const;

 private:
  struct Entry {
    std::string text;                 // canonical, single-spaced, lowercase
    std::vector<std::string> words;
    int category = -1;
  };

  void index_entries();
  void validate() const;

  std::vector<std::string> category_names_;
  std::vector<std::vector<std::string>> members_;  // per category, canonical strings
  std::vector<Entry> entries_;                     // by lexicon id
  std::unordered_map<std::string, std::vector<int>> by_first_word_;
  std::unordered_map<std::string, int> id_by_text_;
  int max_words_ = 1;
};

}  // namespace econet

#pragma once

#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "econet/lexicon.hpp"

namespace econet {

struct TriggerSpan {
  int position = 0;
  std::string surface;
};

// Deterministic rule/lexicon event-trigger tagger. A token is a trigger
// when one of its candidate base forms (token itself, or the token with
// one inflectional suffix stripped: -s/-es/-ies, -ed/-d/-ied, -ing with
// e-restoration and consonant-doubling undone) is in the verb-form list,
// or the token itself is in the deverbal-noun list. Tokens inside
// temporal-indicator matches are never triggers. Immutable after
// construction; safe for concurrent read-only use.
class EventTagger {
 public:
  // Built-in verb and deverbal-noun lists, exclusion against the default
  // temporal lexicon.
  static EventTagger with_default_lexicon();
  static EventTagger with_lexicon(TemporalLexicon lexicon);

  // Adds base forms from a UTF-8 file, one form per line ('#' comments).
  void extend_verbs_from_file(const std::string& path);
  void add_verb_forms(std::span<const std::string> forms);
  void add_noun_forms(std::span<const std::string> forms);

  std::vector<TriggerSpan> tag(std::span<const std::string> tokens) const;
  // Exclusion spans already computed by the caller (token-index ranges).
  std::vector<TriggerSpan> tag(std::span<const std::string> tokens,
                               std::span<const IndicatorMatch> indicator_matches) const;

 private:
  explicit EventTagger(TemporalLexicon lexicon);
  bool is_trigger_word(const std::string& lower_token) const;

  TemporalLexicon lexicon_;
  std::unordered_set<std::string> verb_forms_;
  std::unordered_set<std::string> noun_forms_;
};

}  // namespace econet

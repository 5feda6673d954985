#include "econet/vocab.hpp"

namespace econet {

Vocabulary::Vocabulary() {
  add("<unk>");
  add("<mask>");
  add("<cls>");
  add("<sep>");
}

int Vocabulary::add(const std::string& token) {
  auto [it, inserted] = ids_.try_emplace(token, static_cast<int>(tokens_.size()));
  if (inserted) tokens_.push_back(token);
  return it->second;
}

int Vocabulary::id(const std::string& token) const {
  auto it = ids_.find(token);
  return it == ids_.end() ? kUnk : it->second;
}

std::vector<int> Vocabulary::encode(std::span<const std::string> tokens) const {
  std::vector<int> ids;
  ids.reserve(tokens.size());
  for (const auto& t : tokens) ids.push_back(id(t));
  return ids;
}

Vocabulary Vocabulary::build(std::span<const MaskedSample> samples, const TemporalLexicon& lexicon,
                             const EventVocabulary& event_vocab) {
  Vocabulary vocab;
  for (const auto& s : samples) {
    for (const auto& t : s.tokens) vocab.add(t);
    vocab.add(s.gold);
  }
  for (int id = 0; id < lexicon.size(); ++id) {
    const std::string& atom = lexicon.indicator(id);
    vocab.add(atom);
    std::string word;
    for (char c : atom) {
      if (c == ' ') {
        vocab.add(word);
        word.clear();
      } else {
        word.push_back(c);
      }
    }
    vocab.add(word);
  }
  for (int id = 0; id < event_vocab.size(); ++id) vocab.add(event_vocab.form(id));
  return vocab;
}

}  // namespace econet

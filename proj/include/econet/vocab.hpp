#pragma once

#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "econet/lexicon.hpp"
#include "econet/samples.hpp"

namespace econet {

// Word-level vocabulary for the encoder. Multi-word temporal indicators
// are single atoms (they fill a single mask slot). Ids 0..3 are the
// reserved <unk>, <mask>, <cls>, <sep> tokens.
class Vocabulary {
 public:
  static constexpr int kUnk = 0;
  static constexpr int kMask = 1;
  static constexpr int kCls = 2;
  static constexpr int kSep = 3;

  Vocabulary();

  // Sample tokens and golds in file order, then lexicon atoms and their
  // constituent words, then event vocabulary forms.
  static Vocabulary build(std::span<const MaskedSample> samples, const TemporalLexicon& lexicon,
                          const EventVocabulary& event_vocab);

  int add(const std::string& token);
  int id(const std::string& token) const;  // <unk> when absent
  const std::string& token(int id) const { return tokens_.at(id); }
  int size() const { return static_cast<int>(tokens_.size()); }

  std::vector<int> encode(std::span<const std::string> tokens) const;
  const std::vector<std::string>& all_tokens() const { return tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> ids_;
};

}  // namespace econet

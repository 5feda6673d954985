#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace econet {

inline constexpr std::string_view kMaskToken = "<mask>";

// A masked training sample: one token replaced by the mask symbol.
// kind 1 = temporal indicator, kind 0 = event trigger. gold_label_id
// indexes the temporal lexicon (kind 1) or the event vocabulary (kind 0).
struct MaskedSample {
  std::vector<std::string> tokens;
  int mask_pos = 0;
  std::string gold;
  int kind = 1;
  int gold_label_id = 0;
  std::string source_id;

  bool operator==(const MaskedSample&) const = default;
};

// Dense id space over distinct trigger surface forms, first-seen order.
class EventVocabulary {
 public:
  int add(const std::string& form);  // returns existing id if present
  std::optional<int> id_of(const std::string& form) const;
  const std::string& form(int id) const { return forms_.at(id); }
  int size() const { return static_cast<int>(forms_.size()); }

  // Frozen from the kind=0 samples of a corpus, in sample order.
  static EventVocabulary from_samples(std::span<const MaskedSample> samples);

 private:
  std::vector<std::string> forms_;
  std::unordered_map<std::string, int> ids_;
};

// JSONL with fixed field order: tokens, mask_pos, gold, kind,
// gold_label_id, source_id. One record per line.
void write_samples_jsonl(std::span<const MaskedSample> samples, const std::string& path);
std::vector<MaskedSample> read_samples_jsonl(const std::string& path);

std::string sample_to_json_line(const MaskedSample& s);
MaskedSample sample_from_json_line(std::string_view line, int line_no);

// Stable 64-bit FNV-1a hash over the passage tokens, for the test-set
// exclusion list. Hex-encoded, lowercase.
std::string passage_hash(std::span<const std::string> tokens);

}  // namespace econet

#include "econet/samples.hpp"

#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace econet {

int EventVocabulary::add(const std::string& form) {
  auto [it, inserted] = ids_.try_emplace(form, static_cast<int>(forms_.size()));
  if (inserted) forms_.push_back(form);
  return it->second;
}

std::optional<int> EventVocabulary::id_of(const std::string& form) const {
  auto it = ids_.find(form);
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

EventVocabulary EventVocabulary::from_samples(std::span<const MaskedSample> samples) {
  EventVocabulary vocab;
  for (const auto& s : samples)
    if (s.kind == 0) vocab.add(s.gold);
  return vocab;
}

std::string sample_to_json_line(const MaskedSample& s) {
  nlohmann::ordered_json j;
  j["tokens"] = s.tokens;
  j["mask_pos"] = s.mask_pos;
  j["gold"] = s.gold;
  j["kind"] = s.kind;
  j["gold_label_id"] = s.gold_label_id;
  j["source_id"] = s.source_id;
  return j.dump();
}

MaskedSample sample_from_json_line(std::string_view line, int line_no) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
    MaskedSample s;
    s.tokens = j.at("tokens").get<std::vector<std::string>>();
    s.mask_pos = j.at("mask_pos").get<int>();
    s.gold = j.at("gold").get<std::string>();
    s.kind = j.at("kind").get<int>();
    s.gold_label_id = j.at("gold_label_id").get<int>();
    s.source_id = j.at("source_id").get<std::string>();
    if (s.kind != 0 && s.kind != 1)
      throw std::runtime_error("kind must be 0 or 1");
    if (s.mask_pos < 0 || s.mask_pos >= (int)s.tokens.size() || s.tokens[s.mask_pos] != kMaskToken)
      throw std::runtime_error("mask_pos does not point at the mask token");
    return s;
  } catch (const std::exception& e) {
    throw std::runtime_error("malformed sample record at line " + std::to_string(line_no) + ": " + e.what());
  }
}

void write_samples_jsonl(std::span<const MaskedSample> samples, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  for (const auto& s : samples) out << sample_to_json_line(s) << '\n';
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::vector<MaskedSample> read_samples_jsonl(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  std::vector<MaskedSample> samples;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    samples.push_back(sample_from_json_line(line, line_no));
  }
  return samples;
}

std::string passage_hash(std::span<const std::string> tokens) {
  uint64_t h = 1469598103934665603ull;
  auto mix = [&](unsigned char c) {
    h ^= c;
    h *= 1099511628211ull;
  };
  for (const auto& t : tokens) {
    for (char c : t) mix(static_cast<unsigned char>(c));
    mix(0x1f);  // token separator
  }
  static const char* hex = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[i] = hex[h & 0xf];
    h >>= 4;
  }
  return out;
}

}  // namespace econet

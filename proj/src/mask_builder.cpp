#include "econet/mask_builder.hpp"

#include <cstdlib>
#include <fstream>
#include <stdexcept>

#include "econet/text.hpp"
#include "json.hpp"

namespace econet {

std::vector<Passage> extract_passages(std::span<const std::vector<std::string>> sentence_tokens,
                                      const TemporalLexicon& lexicon, std::string_view doc_id) {
  std::vector<Passage> passages;
  for (size_t i = 0; i < sentence_tokens.size(); ++i) {
    if (lexicon.find_indicators(sentence_tokens[i]).empty()) continue;
    Passage p;
    p.tokens = sentence_tokens[i];
    if (i + 1 < sentence_tokens.size())
      p.tokens.insert(p.tokens.end(), sentence_tokens[i + 1].begin(), sentence_tokens[i + 1].end());
    p.source_id = std::string(doc_id) + ":" + std::to_string(i);
    passages.push_back(std::move(p));
  }
  return passages;
}

MaskedSample build_temporal_sample(const Passage& passage, std::span<const IndicatorMatch> matches) {
  if (matches.empty()) throw std::invalid_argument("build_temporal_sample: no indicator matches");
  const IndicatorMatch& m = matches.front();
  MaskedSample s;
  s.tokens.assign(passage.tokens.begin(), passage.tokens.begin() + m.begin);
  s.tokens.emplace_back(kMaskToken);
  s.tokens.insert(s.tokens.end(), passage.tokens.begin() + m.end, passage.tokens.end());
  s.mask_pos = m.begin;
  s.gold = to_lower(m.surface);
  s.kind = 1;
  s.gold_label_id = m.lexicon_id;
  s.source_id = passage.source_id;
  return s;
}

MaskedSample build_event_sample(const Passage& passage, std::span<const IndicatorMatch> matches,
                                std::span<const TriggerSpan> triggers, EventVocabulary& vocab) {
  if (matches.empty()) throw std::invalid_argument("build_event_sample: no indicator matches");
  if (triggers.empty()) throw std::invalid_argument("build_event_sample: no triggers");
  const int anchor = matches.front().begin;
  const TriggerSpan* best = &triggers.front();
  for (const auto& t : triggers) {
    int d = std::abs(t.position - anchor);
    int best_d = std::abs(best->position - anchor);
    if (d < best_d) best = &t;  // ties keep the earlier trigger
  }
  MaskedSample s;
  s.tokens = passage.tokens;
  s.tokens[best->position] = std::string(kMaskToken);
  s.mask_pos = best->position;
  s.gold = to_lower(best->surface);
  s.kind = 0;
  s.gold_label_id = vocab.add(s.gold);
  s.source_id = passage.source_id;
  return s;
}

std::string CorpusStats::to_json() const {
  nlohmann::ordered_json j;
  j["documents"] = documents;
  j["sentences"] = sentences;
  j["passages"] = passages;
  j["temporal_samples"] = temporal_samples;
  j["event_samples"] = event_samples;
  j["skipped_excluded"] = skipped_excluded;
  j["skipped_no_trigger"] = skipped_no_trigger;
  j["skipped_budget"] = skipped_budget;
  j["matches_per_category"] = matches_per_category;
  return j.dump(2);
}

CorpusBuildResult build_corpus(std::span<const std::string> documents, const TemporalLexicon& lexicon,
                               const EventTagger& tagger, const CorpusBuildOptions& options) {
  CorpusBuildResult result;
  CorpusStats& stats = result.stats;
  const long per_kind = options.budget > 0 ? options.budget / 2 : -1;
  std::vector<MaskedSample> temporal, event;

  int doc_index = 0;
  for (const auto& doc : documents) {
    std::string doc_id = "doc" + std::to_string(doc_index++);
    ++stats.documents;
    auto sentences = split_sentences(doc);
    stats.sentences += (long)sentences.size();
    std::vector<std::vector<std::string>> sentence_tokens;
    sentence_tokens.reserve(sentences.size());
    for (const auto& s : sentences) sentence_tokens.push_back(tokenize_lower(s));
    auto passages = extract_passages(sentence_tokens, lexicon, doc_id);
    stats.passages += (long)passages.size();
    for (const auto& p : passages) {
      if (options.excluded_passage_hashes.count(passage_hash(p.tokens))) {
        ++stats.skipped_excluded;
        continue;
      }
      auto matches = lexicon.find_indicators(p.tokens);
      for (const auto& m : matches) ++stats.matches_per_category[m.category];
      bool temporal_open = per_kind < 0 || (long)temporal.size() < per_kind;
      bool event_open = per_kind < 0 || (long)event.size() < per_kind;
      if (!temporal_open && !event_open) {
        ++stats.skipped_budget;
        continue;
      }
      if (temporal_open) temporal.push_back(build_temporal_sample(p, matches));
      if (event_open) {
        auto triggers = tagger.tag(p.tokens, matches);
        if (triggers.empty()) {
          ++stats.skipped_no_trigger;
        } else {
          event.push_back(build_event_sample(p, matches, triggers, result.event_vocab));
        }
      }
    }
  }
  stats.temporal_samples = (long)temporal.size();
  stats.event_samples = (long)event.size();
  result.samples.reserve(temporal.size() + event.size());
  // Interleave by kind to keep training batches mixed without shuffling.
  size_t i = 0, j = 0;
  while (i < temporal.size() || j < event.size()) {
    if (i < temporal.size()) result.samples.push_back(std::move(temporal[i++]));
    if (j < event.size()) result.samples.push_back(std::move(event[j++]));
  }
  return result;
}

std::unordered_set<std::string> load_exclusion_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open exclusion list: " + path);
  std::unordered_set<std::string> hashes;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    hashes.insert(line);
  }
  return hashes;
}

}  // namespace econet

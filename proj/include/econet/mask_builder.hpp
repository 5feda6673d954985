#pragma once

#include <map>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "econet/event_tagger.hpp"
#include "econet/lexicon.hpp"
#include "econet/samples.hpp"

namespace econet {

// One or two consecutive sentences containing at least one temporal
// indicator, with provenance "docid:sentence-index".
struct Passage {
  std::vector<std::string> tokens;
  std::string source_id;
};

// Emits a passage for every sentence with an indicator match: that
// sentence plus its follower when one exists, else the sentence alone.
std::vector<Passage> extract_passages(std::span<const std::vector<std::string>> sentence_tokens,
                                      const TemporalLexicon& lexicon, std::string_view doc_id);

// Masks the first indicator match. Multi-word indicators collapse to a
// single mask token; gold keeps the full indicator string.
MaskedSample build_temporal_sample(const Passage& passage, std::span<const IndicatorMatch> matches);

// Masks the trigger nearest to the first indicator's start (ties toward
// the earlier trigger); registers the gold form in the vocabulary.
MaskedSample build_event_sample(const Passage& passage, std::span<const IndicatorMatch> matches,
                                std::span<const TriggerSpan> triggers, EventVocabulary& vocab);

struct CorpusStats {
  long documents = 0;
  long sentences = 0;
  long passages = 0;
  long temporal_samples = 0;
  long event_samples = 0;
  long skipped_excluded = 0;   // passage hash on the exclusion list
  long skipped_no_trigger = 0; // wanted an event sample, no trigger available
  long skipped_budget = 0;     // passage seen after the budget filled
  std::map<std::string, long> matches_per_category;

  std::string to_json() const;
};

struct CorpusBuildOptions {
  // Total sample budget; emits up to budget/2 per kind. <= 0 means
  // unbounded.
  long budget = -1;
  std::unordered_set<std::string> excluded_passage_hashes;
};

struct CorpusBuildResult {
  std::vector<MaskedSample> samples;
  EventVocabulary event_vocab;
  CorpusStats stats;
};

// Deterministic scan: documents in the given order, passages in document
// order; a temporal and an event sample are drawn from the same passage
// pool under disjoint per-kind budgets.
CorpusBuildResult build_corpus(std::span<const std::string> documents, const TemporalLexicon& lexicon,
                               const EventTagger& tagger, const CorpusBuildOptions& options);

std::unordered_set<std::string> load_exclusion_list(const std::string& path);

}  // namespace econet

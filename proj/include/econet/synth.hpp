#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "econet/task_types.hpp"

namespace econet {

// Two-clause sentences whose temporal relation is pinned by a planted
// indicator: "the <s1> <v1> <before-ind> the <s2> <v2>", with [after]
// clauses using "had <participle>" and [during] clauses "was <gerund>".
// The tense cues correlate context with the indicator category, so
// masked-indicator prediction is learnable and transfers to the tasks.
struct SynthSentence {
  std::vector<std::string> tokens;
  int v1_pos = 0;
  int v2_pos = 0;
  int category = 0;  // 0 = before, 1 = after, 2 = during
  std::string indicator;
};

SynthSentence synth_sentence(std::mt19937_64& rng);

// Plain-text documents for the pre-training corpus.
std::vector<std::string> synth_documents(int n_docs, int sentences_per_doc, uint64_t seed);

inline const std::vector<std::string> kSynthRelationNames = {"BEFORE", "AFTER", "SIMULTANEOUS"};

struct SynthEreData {
  std::vector<EREExample> examples;
  LabelSet labels;  // BEFORE / AFTER / SIMULTANEOUS, no negative labels
};
SynthEreData synth_ere(int n, uint64_t seed);

// Two questions per passage ("first" / "second"), grouped for the
// consistency metric; [during] passages have empty answer sets.
std::vector<ExtractiveQAExample> synth_extractive_qa(int n_passages, uint64_t seed);

// One candidate statement per passage, true when its relation word
// matches the passage category.
std::vector<BinaryQAExample> synth_binary_qa(int n, uint64_t seed);

}  // namespace econet

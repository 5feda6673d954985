#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "econet/adam.hpp"
#include "econet/lexicon.hpp"
#include "econet/objectives.hpp"
#include "econet/vocab.hpp"

namespace econet {

// Self-describing container: a JSON header (config, vocabularies,
// lexicon, block manifest) followed by raw little-endian doubles per
// block. Save -> load round-trips bit-exactly.
struct RawCheckpoint {
  nlohmann::ordered_json meta;
  std::vector<std::pair<std::string, std::vector<double>>> blocks;
};

void write_raw_checkpoint(const std::string& path, nlohmann::ordered_json meta,
                          const std::vector<ConstTensorView>& blocks);
RawCheckpoint read_raw_checkpoint(const std::string& path);

struct PretrainCheckpoint {
  ModelConfig config;
  EconetModel model;
  Vocabulary vocab;
  EventVocabulary event_vocab;
  TemporalLexicon lexicon;
  long step = 0;
  std::string rng_state;
  std::optional<AdamState<EconetModel>> adam;
  nlohmann::ordered_json extra;  // run metadata, echoed back on load
};

void save_pretrain_checkpoint(const std::string& path, const PretrainCheckpoint& ckpt);
PretrainCheckpoint load_pretrain_checkpoint(const std::string& path);

nlohmann::ordered_json model_config_to_json(const ModelConfig& config);
ModelConfig model_config_from_json(const nlohmann::json& j);

Vocabulary vocabulary_from_tokens(const std::vector<std::string>& tokens);
EventVocabulary event_vocabulary_from_forms(const std::vector<std::string>& forms);
nlohmann::ordered_json lexicon_to_json(const TemporalLexicon& lexicon);
TemporalLexicon lexicon_from_json(const nlohmann::json& j);

}  // namespace econet

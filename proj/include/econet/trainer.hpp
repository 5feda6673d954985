#pragma once

#include <string>
#include <vector>

#include "econet/checkpoint.hpp"
#include "econet/objectives.hpp"

namespace econet {

struct PretrainRunConfig {
  ModelConfig model;
  PretrainMode mode = PretrainMode::econet;
  double alpha = 1.0;
  double beta = 1.0;
  double r_percent = 50.0;
  double lr = 1e-3;
  int batch_size = 8;
  long max_steps = 2000;
  long checkpoint_interval = 500;
  long generator_warmup_steps = 0;  // train without the discriminator first
  uint64_t seed = 5;
};

struct LossLogRow {
  long step = 0;
  LossBreakdown breakdown;
  double disc_accuracy = 0.0;
};

std::string loss_log_header();
std::string loss_log_csv(const LossLogRow& row);

// Single-writer training loop over masked samples. Batches are drawn
// uniformly from one rng stream that also feeds perturbation and
// dropout, so a saved rng state resumes the trajectory bit-identically.
class Trainer {
 public:
  Trainer(const PretrainRunConfig& config, std::vector<MaskedSample> samples);
  Trainer(const PretrainCheckpoint& checkpoint, const PretrainRunConfig& config,
          std::vector<MaskedSample> samples);

  LossLogRow step();
  long current_step() const { return step_; }
  long skipped_overlength() const { return skipped_overlength_; }

  const EconetModel& model() const { return model_; }
  const Vocabulary& vocab() const { return vocab_; }
  const EventVocabulary& event_vocab() const { return event_vocab_; }
  const TemporalLexicon& lexicon() const { return lexicon_; }
  const PretrainRunConfig& config() const { return config_; }

  PretrainCheckpoint make_checkpoint(bool with_optimizer) const;

 private:
  void filter_samples();

  PretrainRunConfig config_;
  std::vector<MaskedSample> samples_;
  TemporalLexicon lexicon_;
  EventVocabulary event_vocab_;
  Vocabulary vocab_;
  EconetModel model_;
  AdamState<EconetModel> opt_;
  std::mt19937_64 rng_;
  long step_ = 0;
  long skipped_overlength_ = 0;
};

}  // namespace econet

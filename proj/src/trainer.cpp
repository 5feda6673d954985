#include "econet/trainer.hpp"

#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace econet {

std::string loss_log_header() { return "step,l_temporal,l_event,l_disc,l_joint,disc_accuracy"; }

std::string loss_log_csv(const LossLogRow& row) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%ld,%.17g,%.17g,%.17g,%.17g,%.17g", row.step, row.breakdown.l_temporal,
                row.breakdown.l_event, row.breakdown.l_disc, row.breakdown.l_joint, row.disc_accuracy);
  return buf;
}

Trainer::Trainer(const PretrainRunConfig& config, std::vector<MaskedSample> samples)
    : config_(config),
      samples_(std::move(samples)),
      lexicon_(TemporalLexicon::load_default()),
      event_vocab_(EventVocabulary::from_samples(samples_)),
      vocab_(Vocabulary::build(samples_, lexicon_, event_vocab_)),
      rng_(config.seed) {
  if (samples_.empty()) throw std::invalid_argument("pretrain: empty dataset");
  filter_samples();
  config_.model.vocab_size = vocab_.size();
  config_.model.validate();
  // The event head needs at least one output even on a corpus with no
  // event samples (generator-only temporal runs).
  const int event_dim = std::max(1, event_vocab_.size());
  model_ = EconetModel::init(config_.model, event_dim, config_.seed);
  opt_ = AdamState<EconetModel>::zeros_like(config_.model, event_dim);
}

Trainer::Trainer(const PretrainCheckpoint& checkpoint, const PretrainRunConfig& config,
                 std::vector<MaskedSample> samples)
    : config_(config),
      samples_(std::move(samples)),
      lexicon_(checkpoint.lexicon),
      event_vocab_(checkpoint.event_vocab),
      vocab_(checkpoint.vocab),
      model_(checkpoint.model),
      step_(checkpoint.step) {
  if (samples_.empty()) throw std::invalid_argument("pretrain: empty dataset");
  config_.model = checkpoint.config;
  filter_samples();
  if (checkpoint.adam) {
    opt_ = *checkpoint.adam;
  } else {
    opt_ = AdamState<EconetModel>::zeros_like(config_.model, model_.heads.event.out_dim());
  }
  std::istringstream in(checkpoint.rng_state);
  in >> rng_;
  if (!in) throw std::runtime_error("invalid rng state in checkpoint");
}

void Trainer::filter_samples() {
  std::vector<MaskedSample> kept;
  kept.reserve(samples_.size());
  for (auto& s : samples_) {
    if ((int)s.tokens.size() > config_.model.max_seq_len) {
      ++skipped_overlength_;
      continue;
    }
    if (s.kind == 1) {
      if (lexicon_.id_of(s.gold) != s.gold_label_id)
        throw std::invalid_argument("sample " + s.source_id + ": gold_label_id does not match the lexicon");
    } else {
      auto id = event_vocab_.id_of(s.gold);
      if (!id || *id != s.gold_label_id)
        throw std::invalid_argument("sample " + s.source_id +
                                    ": gold_label_id does not match the event vocabulary");
    }
    kept.push_back(std::move(s));
  }
  samples_ = std::move(kept);
  if (samples_.empty()) throw std::invalid_argument("pretrain: every sample exceeds max_seq_len");
}

LossLogRow Trainer::step() {
  std::vector<MaskedSample> batch;
  batch.reserve(config_.batch_size);
  std::uniform_int_distribution<size_t> pick(0, samples_.size() - 1);
  for (int i = 0; i < config_.batch_size; ++i) batch.push_back(samples_[pick(rng_)]);

  StepOptions opts;
  opts.mode = config_.mode;
  if (config_.mode == PretrainMode::econet && step_ < config_.generator_warmup_steps)
    opts.mode = PretrainMode::generator_only;
  opts.alpha = config_.alpha;
  opts.beta = config_.beta;
  opts.r_percent = config_.r_percent;
  opts.lr = config_.lr;
  opts.train_dropout = config_.model.dropout_rate > 0.0;

  StepResult result = joint_step(model_, opt_, batch, opts, rng_, vocab_, lexicon_, event_vocab_);
  ++step_;
  LossLogRow row;
  row.step = step_;
  row.breakdown = result.breakdown;
  row.disc_accuracy = result.disc_accuracy;
  return row;
}

PretrainCheckpoint Trainer::make_checkpoint(bool with_optimizer) const {
  PretrainCheckpoint ckpt;
  ckpt.config = config_.model;
  ckpt.model = model_;
  ckpt.vocab = vocab_;
  ckpt.event_vocab = event_vocab_;
  ckpt.lexicon = lexicon_;
  ckpt.step = step_;
  std::ostringstream out;
  out << rng_;
  ckpt.rng_state = out.str();
  if (with_optimizer) ckpt.adam = opt_;
  nlohmann::ordered_json run;
  run["mode"] = to_string(config_.mode);
  run["alpha"] = config_.alpha;
  run["beta"] = config_.beta;
  run["r_percent"] = config_.r_percent;
  run["lr"] = config_.lr;
  run["batch_size"] = config_.batch_size;
  run["seed"] = config_.seed;
  ckpt.extra = std::move(run);
  return ckpt;
}

}  // namespace econet

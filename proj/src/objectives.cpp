#include "econet/objectives.hpp"

#include <cmath>
#include <stdexcept>

namespace econet {

LinearHead LinearHead::zeros(int hidden, int out) {
  LinearHead h;
  h.w = MatrixXd::Zero(hidden, out);
  h.b = VectorXd::Zero(out);
  return h;
}

LinearHead LinearHead::init(int hidden, int out, uint64_t seed) {
  LinearHead h = zeros(hidden, out);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 0.02);
  for (Eigen::Index i = 0; i < h.w.size(); ++i) h.w.data()[i] = normal(rng);
  return h;
}

HeadParameters HeadParameters::zeros(int hidden, int event_vocab_size) {
  HeadParameters p;
  p.temporal = LinearHead::zeros(hidden, 40);
  p.event = LinearHead::zeros(hidden, event_vocab_size);
  p.disc = LinearHead::zeros(hidden, 1);
  return p;
}

HeadParameters HeadParameters::init(int hidden, int event_vocab_size, uint64_t seed) {
  HeadParameters p;
  p.temporal = LinearHead::init(hidden, 40, seed ^ 0x54);
  p.event = LinearHead::init(hidden, event_vocab_size, seed ^ 0x45);
  p.disc = LinearHead::init(hidden, 1, seed ^ 0x44);
  return p;
}

EconetModel EconetModel::zeros(const ModelConfig& config, int event_vocab_size) {
  EconetModel m;
  m.encoder = MiniLmParameters::zeros(config);
  m.heads = HeadParameters::zeros(config.hidden_dim, event_vocab_size);
  m.mlm = LinearHead::zeros(config.hidden_dim, config.vocab_size);
  return m;
}

EconetModel EconetModel::init(const ModelConfig& config, int event_vocab_size, uint64_t seed) {
  EconetModel m;
  m.encoder = MiniLmParameters::init(config, seed);
  m.heads = HeadParameters::init(config.hidden_dim, event_vocab_size, seed ^ 0x9e3779b9);
  m.mlm = LinearHead::init(config.hidden_dim, config.vocab_size, seed ^ 0x7f4a7c15);
  return m;
}

HeadLossResult softmax_xent_at(const LinearHead& head, const MatrixXd& hidden, int position, int gold,
                               LinearHead* grads, double weight) {
  if (position < 0 || position >= hidden.rows()) throw std::out_of_range("loss position out of range");
  if (gold < 0 || gold >= head.out_dim())
    throw std::out_of_range("gold label " + std::to_string(gold) + " outside label space of size " +
                            std::to_string(head.out_dim()));
  const VectorXd h = hidden.row(position).transpose();
  VectorXd logits = head.w.transpose() * h + head.b;
  const double mx = logits.maxCoeff();
  VectorXd ex = (logits.array() - mx).exp();
  const double z = ex.sum();
  HeadLossResult result;
  result.probs = ex / z;
  result.loss = -(std::log(result.probs(gold)));
  VectorXd d_logits = result.probs;
  d_logits(gold) -= 1.0;
  d_logits *= weight;
  if (grads) {
    grads->w.noalias() += h * d_logits.transpose();
    grads->b.noalias() += d_logits;
  }
  result.d_hidden = head.w * d_logits;
  return result;
}

HeadLossResult temporal_loss(const ForwardTrace& trace, int mask_pos, int gold_label_id,
                             const LinearHead& f_t, LinearHead* grads, double weight) {
  if (f_t.out_dim() != 40) throw std::invalid_argument("temporal head must have 40 outputs");
  return softmax_xent_at(f_t, trace.final_hidden(), mask_pos, gold_label_id, grads, weight);
}

HeadLossResult event_loss(const ForwardTrace& trace, int mask_pos, int gold_label_id,
                          const LinearHead& f_e, LinearHead* grads, double weight) {
  return softmax_xent_at(f_e, trace.final_hidden(), mask_pos, gold_label_id, grads, weight);
}

BinaryLossResult sigmoid_bce_at(const LinearHead& head, const MatrixXd& hidden, int position, int y,
                                LinearHead* grads, double weight) {
  if (head.out_dim() != 1) throw std::invalid_argument("discriminator head must have one output");
  if (position < 0 || position >= hidden.rows()) throw std::out_of_range("loss position out of range");
  if (y != 0 && y != 1) throw std::invalid_argument("discriminator label must be 0 or 1");
  const VectorXd h = hidden.row(position).transpose();
  const double z = head.w.col(0).dot(h) + head.b(0);
  BinaryLossResult result;
  result.prob = 1.0 / (1.0 + std::exp(-z));
  // Stable form of -[y log p + (1-y) log(1-p)].
  result.loss = std::max(z, 0.0) - z * double(y) + std::log1p(std::exp(-std::abs(z)));
  const double dz = (result.prob - double(y)) * weight;
  if (grads) {
    grads->w.col(0).noalias() += h * dz;
    grads->b(0) += dz;
  }
  result.d_hidden = head.w.col(0) * dz;
  return result;
}

PerturbOutcome perturb_prediction(const std::string& predicted, const std::string& gold, int kind,
                                  double r_percent, std::mt19937_64& rng, const TemporalLexicon& lexicon,
                                  const EventVocabulary& event_vocab) {
  if (r_percent < 0.0 || r_percent > 100.0) throw std::invalid_argument("r_percent must be in [0,100]");
  PerturbOutcome out;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  if (unit(rng) < r_percent / 100.0) {
    out.replaced = true;
    if (kind == 1) {
      if (lexicon.size() == 0) throw std::invalid_argument("empty temporal lexicon");
      std::uniform_int_distribution<int> pick(0, lexicon.size() - 1);
      out.emitted = lexicon.indicator(pick(rng));
    } else {
      if (event_vocab.size() == 0) throw std::invalid_argument("empty event vocabulary");
      std::uniform_int_distribution<int> pick(0, event_vocab.size() - 1);
      out.emitted = event_vocab.form(pick(rng));
    }
  } else {
    out.emitted = predicted;
  }
  out.y = out.emitted == gold ? 1 : 0;
  return out;
}

PretrainMode pretrain_mode_from_string(const std::string& s) {
  if (s == "econet") return PretrainMode::econet;
  if (s == "generator_only") return PretrainMode::generator_only;
  if (s == "random_mask") return PretrainMode::random_mask;
  throw std::invalid_argument("unknown pretrain mode: " + s);
}

std::string to_string(PretrainMode mode) {
  switch (mode) {
    case PretrainMode::econet: return "econet";
    case PretrainMode::generator_only: return "generator_only";
    case PretrainMode::random_mask: return "random_mask";
  }
  return "econet";
}

std::vector<DiscriminatorInstance> prepare_disc_instances(const EconetModel& model,
                                                          std::span<const MaskedSample> batch,
                                                          std::span<const std::vector<int>> encoded,
                                                          double r_percent, std::mt19937_64& rng,
                                                          const Vocabulary& vocab,
                                                          const TemporalLexicon& lexicon,
                                                          const EventVocabulary& event_vocab) {
  std::vector<DiscriminatorInstance> instances;
  instances.reserve(batch.size());
  for (size_t i = 0; i < batch.size(); ++i) {
    const MaskedSample& s = batch[i];
    auto trace = forward(model.encoder, encoded[i], false, 0);
    const LinearHead& head = s.kind == 1 ? model.heads.temporal : model.heads.event;
    HeadLossResult gen = softmax_xent_at(head, trace.final_hidden(), s.mask_pos, s.gold_label_id, nullptr, 0.0);
    int argmax = 0;
    gen.probs.maxCoeff(&argmax);
    std::string predicted = s.kind == 1 ? lexicon.indicator(argmax) : event_vocab.form(argmax);
    PerturbOutcome outcome = perturb_prediction(predicted, s.gold, s.kind, r_percent, rng, lexicon, event_vocab);
    DiscriminatorInstance inst;
    inst.filled_ids = encoded[i];
    inst.filled_ids[s.mask_pos] = vocab.id(outcome.emitted);
    inst.position = s.mask_pos;
    inst.y = outcome.y;
    instances.push_back(std::move(inst));
  }
  return instances;
}

LossBreakdown joint_loss(const EconetModel& model, std::span<const MaskedSample> batch,
                         std::span<const std::vector<int>> encoded,
                         std::span<const DiscriminatorInstance> instances, double alpha, double beta,
                         bool train_dropout, uint64_t dropout_seed, EconetModel* grads,
                         double* disc_accuracy, double* temporal_accuracy) {
  if (batch.empty()) throw std::invalid_argument("joint_loss: empty batch");
  long n_temporal = 0, n_event = 0;
  for (const auto& s : batch) (s.kind == 1 ? n_temporal : n_event)++;

  LossBreakdown breakdown;
  breakdown.alpha = alpha;
  breakdown.beta = beta;
  long disc_correct = 0;
  long temporal_correct = 0;

  for (size_t i = 0; i < batch.size(); ++i) {
    const MaskedSample& s = batch[i];
    ForwardCache cache;
    auto trace = forward(model.encoder, encoded[i], train_dropout, dropout_seed + 2 * i, &cache);
    const bool is_temporal = s.kind == 1;
    const double kind_weight = is_temporal ? 1.0 / double(n_temporal) : alpha / double(n_event);
    LinearHead* head_grads = nullptr;
    if (grads) head_grads = is_temporal ? &grads->heads.temporal : &grads->heads.event;
    const LinearHead& head = is_temporal ? model.heads.temporal : model.heads.event;
    HeadLossResult gen = softmax_xent_at(head, trace.final_hidden(), s.mask_pos, s.gold_label_id,
                                         head_grads, kind_weight);
    if (is_temporal) {
      breakdown.l_temporal += gen.loss / double(n_temporal);
      int argmax = 0;
      gen.probs.maxCoeff(&argmax);
      if (argmax == s.gold_label_id) ++temporal_correct;
    } else {
      breakdown.l_event += gen.loss / double(n_event);
    }
    if (grads) {
      MatrixXd d_final = MatrixXd::Zero(trace.final_hidden().rows(), trace.final_hidden().cols());
      d_final.row(s.mask_pos) = gen.d_hidden.transpose();
      backward(model.encoder, cache, d_final, grads->encoder);
    }
  }

  if (!instances.empty()) {
    const double disc_weight = beta / double(instances.size());
    for (size_t i = 0; i < instances.size(); ++i) {
      const DiscriminatorInstance& inst = instances[i];
      ForwardCache cache;
      auto trace = forward(model.encoder, inst.filled_ids, train_dropout, dropout_seed + 2 * i + 1, &cache);
      BinaryLossResult disc = sigmoid_bce_at(model.heads.disc, trace.final_hidden(), inst.position, inst.y,
                                             grads ? &grads->heads.disc : nullptr, disc_weight);
      breakdown.l_disc += disc.loss / double(instances.size());
      if ((disc.prob > 0.5) == (inst.y == 1)) ++disc_correct;
      if (grads) {
        MatrixXd d_final = MatrixXd::Zero(trace.final_hidden().rows(), trace.final_hidden().cols());
        d_final.row(inst.position) = disc.d_hidden.transpose();
        backward(model.encoder, cache, d_final, grads->encoder);
      }
    }
  }

  breakdown.l_joint = breakdown.l_temporal + alpha * breakdown.l_event + beta * breakdown.l_disc;
  if (disc_accuracy)
    *disc_accuracy = instances.empty() ? 0.0 : double(disc_correct) / double(instances.size());
  if (temporal_accuracy)
    *temporal_accuracy = n_temporal == 0 ? 0.0 : double(temporal_correct) / double(n_temporal);
  return breakdown;
}

StepResult joint_step(EconetModel& model, AdamState<EconetModel>& opt, std::span<const MaskedSample> batch,
                      const StepOptions& options, std::mt19937_64& rng, const Vocabulary& vocab,
                      const TemporalLexicon& lexicon, const EventVocabulary& event_vocab) {
  if (batch.empty()) throw std::invalid_argument("joint_step: empty batch");
  if (options.mode == PretrainMode::random_mask)
    return random_mask_step(model, opt, batch, options, rng, vocab);

  std::vector<std::vector<int>> encoded;
  encoded.reserve(batch.size());
  for (const auto& s : batch) encoded.push_back(vocab.encode(s.tokens));

  const bool with_disc = options.mode == PretrainMode::econet;
  std::vector<DiscriminatorInstance> instances;
  if (with_disc)
    instances = prepare_disc_instances(model, batch, encoded, options.r_percent, rng, vocab, lexicon,
                                       event_vocab);
  const uint64_t dropout_seed = rng();

  EconetModel grads = EconetModel::zeros(model.encoder.config, model.heads.event.out_dim());
  StepResult result;
  result.breakdown = joint_loss(model, batch, encoded, instances, options.alpha,
                                with_disc ? options.beta : 0.0, options.train_dropout, dropout_seed, &grads,
                                &result.disc_accuracy, &result.temporal_accuracy);
  if (!with_disc) {
    result.breakdown.beta = options.beta;
    result.breakdown.l_disc = 0.0;
  }
  for (const auto& s : batch) (s.kind == 1 ? result.temporal_count : result.event_count)++;
  adam_step(model, grads, opt, options.lr);
  return result;
}

std::vector<int> demask_token_ids(const MaskedSample& sample, const Vocabulary& vocab) {
  std::vector<int> ids = vocab.encode(sample.tokens);
  ids[sample.mask_pos] = vocab.id(sample.gold);
  return ids;
}

StepResult random_mask_step(EconetModel& model, AdamState<EconetModel>& opt,
                            std::span<const MaskedSample> batch, const StepOptions& options,
                            std::mt19937_64& rng, const Vocabulary& vocab) {
  if (batch.empty()) throw std::invalid_argument("random_mask_step: empty batch");
  EconetModel grads = EconetModel::zeros(model.encoder.config, model.heads.event.out_dim());
  StepResult result;
  const uint64_t dropout_seed = rng();
  const double weight = 1.0 / double(batch.size());
  for (size_t i = 0; i < batch.size(); ++i) {
    std::vector<int> ids = demask_token_ids(batch[i], vocab);
    // Mask one uniformly random non-special token.
    std::vector<int> candidates;
    for (int p = 0; p < (int)ids.size(); ++p)
      if (ids[p] > Vocabulary::kSep) candidates.push_back(p);
    if (candidates.empty()) candidates.push_back(batch[i].mask_pos);
    std::uniform_int_distribution<size_t> pick(0, candidates.size() - 1);
    const int pos = candidates[pick(rng)];
    const int gold_id = ids[pos];
    ids[pos] = Vocabulary::kMask;
    ForwardCache cache;
    auto trace = forward(model.encoder, ids, options.train_dropout, dropout_seed + i, &cache);
    HeadLossResult mlm = softmax_xent_at(model.mlm, trace.final_hidden(), pos, gold_id, &grads.mlm, weight);
    result.breakdown.l_temporal += mlm.loss * weight;
    MatrixXd d_final = MatrixXd::Zero(trace.final_hidden().rows(), trace.final_hidden().cols());
    d_final.row(pos) = mlm.d_hidden.transpose();
    backward(model.encoder, cache, d_final, grads.encoder);
  }
  result.breakdown.alpha = options.alpha;
  result.breakdown.beta = options.beta;
  result.breakdown.l_joint = result.breakdown.l_temporal;
  for (const auto& s : batch) (s.kind == 1 ? result.temporal_count : result.event_count)++;
  adam_step(model, grads, opt, options.lr);
  return result;
}

}  // namespace econet

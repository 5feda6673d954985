#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "econet/adam.hpp"
#include "econet/lexicon.hpp"
#include "econet/minilm.hpp"
#include "econet/samples.hpp"
#include "econet/vocab.hpp"

namespace econet {

// A single linear output head: logits = w^T h + b, w is hidden x out.
struct LinearHead {
  MatrixXd w;
  VectorXd b;
  static LinearHead zeros(int hidden, int out);
  static LinearHead init(int hidden, int out, uint64_t seed);
  int out_dim() const { return static_cast<int>(b.size()); }
};

template <typename Head, typename Fn>
void visit_head(const std::string& prefix, Head& h, Fn&& fn) {
  fn(prefix + ".w", h.w);
  fn(prefix + ".b", h.b);
}

// Generator and discriminator heads over the shared encoder: the
// temporal head is 40-way, the event head covers the event vocabulary,
// the discriminator outputs one logit.
struct HeadParameters {
  LinearHead temporal;
  LinearHead event;
  LinearHead disc;
  static HeadParameters zeros(int hidden, int event_vocab_size);
  static HeadParameters init(int hidden, int event_vocab_size, uint64_t seed);
};

template <typename Params, typename Fn>
  requires std::same_as<std::remove_const_t<Params>, HeadParameters>
void visit_tensors(Params& p, Fn&& fn) {
  visit_head("f_T", p.temporal, fn);
  visit_head("f_E", p.event, fn);
  visit_head("f_D", p.disc, fn);
}

// Everything trained during continual pre-training: the shared encoder,
// the three heads, and the vocabulary-sized head used by the
// random-mask baseline.
struct EconetModel {
  MiniLmParameters encoder;
  HeadParameters heads;
  LinearHead mlm;

  static EconetModel zeros(const ModelConfig& config, int event_vocab_size);
  static EconetModel init(const ModelConfig& config, int event_vocab_size, uint64_t seed);
};

template <typename Params, typename Fn>
  requires std::same_as<std::remove_const_t<Params>, EconetModel>
void visit_tensors(Params& p, Fn&& fn) {
  visit_tensors(p.encoder, fn);
  visit_tensors(p.heads, fn);
  visit_head("f_MLM", p.mlm, fn);
}

struct LossBreakdown {
  double l_temporal = 0.0;
  double l_event = 0.0;
  double l_disc = 0.0;
  double l_joint = 0.0;
  double alpha = 1.0;
  double beta = 1.0;
};

struct DiscriminatorInstance {
  std::vector<int> filled_ids;  // masked sequence with the slot filled
  int position = 0;
  int y = 0;  // 1 = original token, 0 = corrupted
};

struct HeadLossResult {
  double loss = 0.0;
  VectorXd probs;
  VectorXd d_hidden;  // gradient at the read position, already weighted
};

// Cross-entropy of softmax(head(h)) at the mask position. When grads is
// given, head gradients accumulate scaled by weight and d_hidden carries
// the same scaling.
HeadLossResult softmax_xent_at(const LinearHead& head, const MatrixXd& hidden, int position, int gold,
                               LinearHead* grads, double weight);

HeadLossResult temporal_loss(const ForwardTrace& trace, int mask_pos, int gold_label_id,
                             const LinearHead& f_t, LinearHead* grads = nullptr, double weight = 1.0);
HeadLossResult event_loss(const ForwardTrace& trace, int mask_pos, int gold_label_id,
                          const LinearHead& f_e, LinearHead* grads = nullptr, double weight = 1.0);

struct BinaryLossResult {
  double loss = 0.0;
  double prob = 0.0;
  VectorXd d_hidden;
};

// Binary cross-entropy of sigmoid(f_D(h)) at the mask position.
BinaryLossResult sigmoid_bce_at(const LinearHead& head, const MatrixXd& hidden, int position, int y,
                                LinearHead* grads, double weight);

struct PerturbOutcome {
  std::string emitted;
  int y = 0;
  bool replaced = false;
};

// With probability r% the generator's prediction is replaced by a
// uniform draw from the temporal lexicon (kind=1) or the event
// vocabulary (kind=0). y = 1 iff the emitted token equals gold.
PerturbOutcome perturb_prediction(const std::string& predicted, const std::string& gold, int kind,
                                  double r_percent, std::mt19937_64& rng, const TemporalLexicon& lexicon,
                                  const EventVocabulary& event_vocab);

enum class PretrainMode { econet, generator_only, random_mask };
PretrainMode pretrain_mode_from_string(const std::string& s);
std::string to_string(PretrainMode mode);

struct StepOptions {
  PretrainMode mode = PretrainMode::econet;
  double alpha = 1.0;
  double beta = 1.0;
  double r_percent = 50.0;
  double lr = 1e-3;
  bool train_dropout = true;
};

struct StepResult {
  LossBreakdown breakdown;
  double disc_accuracy = 0.0;  // over this step's discriminator instances
  double temporal_accuracy = 0.0;
  long temporal_count = 0;
  long event_count = 0;
};

// Builds one discriminator instance per batch item from the generator's
// argmax predictions (deterministic eval-mode forward) plus r% random
// perturbation.
std::vector<DiscriminatorInstance> prepare_disc_instances(const EconetModel& model,
                                                          std::span<const MaskedSample> batch,
                                                          std::span<const std::vector<int>> encoded,
                                                          double r_percent, std::mt19937_64& rng,
                                                          const Vocabulary& vocab,
                                                          const TemporalLexicon& lexicon,
                                                          const EventVocabulary& event_vocab);

// The differentiable joint loss L = L_T + alpha*L_E + beta*L_D with the
// discriminator instances held fixed; per-kind losses are means over
// their items, the discriminator loss a mean over instances. Gradients
// accumulate into grads when given.
LossBreakdown joint_loss(const EconetModel& model, std::span<const MaskedSample> batch,
                         std::span<const std::vector<int>> encoded,
                         std::span<const DiscriminatorInstance> instances, double alpha, double beta,
                         bool train_dropout, uint64_t dropout_seed, EconetModel* grads,
                         double* disc_accuracy = nullptr, double* temporal_accuracy = nullptr);

// One optimizer step over a mixed batch, routing kinds to their heads.
StepResult joint_step(EconetModel& model, AdamState<EconetModel>& opt, std::span<const MaskedSample> batch,
                      const StepOptions& options, std::mt19937_64& rng, const Vocabulary& vocab,
                      const TemporalLexicon& lexicon, const EventVocabulary& event_vocab);

// Random-mask baseline step: de-masks each sample, masks one uniformly
// random position, and trains the vocabulary head with cross-entropy.
// The mask-prediction loss is reported in l_temporal so the log schema
// stays comparable.
StepResult random_mask_step(EconetModel& model, AdamState<EconetModel>& opt,
                            std::span<const MaskedSample> batch, const StepOptions& options,
                            std::mt19937_64& rng, const Vocabulary& vocab);

std::vector<int> demask_token_ids(const MaskedSample& sample, const Vocabulary& vocab);

}  // namespace econet

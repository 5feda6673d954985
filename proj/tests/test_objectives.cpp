#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "econet/checkpoint.hpp"
#include "econet/mask_builder.hpp"
#include "econet/trainer.hpp"

using namespace econet;

namespace {

double rel_err(double a, double b) {
  double denom = std::max({std::abs(a), std::abs(b), 1e-5});
  return std::abs(a - b) / denom;
}

// Handcrafted two-clause news-style corpus with indicator + triggers.
std::vector<std::string> toy_documents(int docs, uint64_t seed) {
  static const std::vector<std::string> subjects = {"the army",   "the senate", "the union",
                                                    "the bank",   "the court",  "the council",
                                                    "the agency", "the police"};
  static const std::vector<std::string> verbs = {"attacked", "voted",    "protested", "collapsed",
                                                 "merged",   "resigned", "marched",   "celebrated"};
  static const std::vector<std::string> indicators = {"before", "after", "while", "once", "when",
                                                      "soon after", "prior to", "in the end"};
  std::mt19937_64 rng(seed);
  std::vector<std::string> out;
  for (int d = 0; d < docs; ++d) {
    std::string doc = "The " + subjects[rng() % subjects.size()].substr(4) + " " + verbs[rng() % verbs.size()] +
                      " " + indicators[rng() % indicators.size()] + " " + subjects[rng() % subjects.size()] +
                      " " + verbs[rng() % verbs.size()] + ".";
    out.push_back(doc);
  }
  return out;
}

struct Setup {
  TemporalLexicon lex = TemporalLexicon::load_default();
  std::vector<MaskedSample> samples;
  EventVocabulary evocab;
  Vocabulary vocab;
  ModelConfig cfg;
  EconetModel model;

  explicit Setup(int docs = 24, uint64_t seed = 7, int layers = 1, int heads = 1, int dim = 8) {
    auto tagger = EventTagger::with_default_lexicon();
    auto built = build_corpus(toy_documents(docs, seed), lex, tagger, {});
    samples = std::move(built.samples);
    evocab = std::move(built.event_vocab);
    vocab = Vocabulary::build(samples, lex, evocab);
    cfg.n_layers = layers;
    cfg.n_heads = heads;
    cfg.hidden_dim = dim;
    cfg.ffn_dim = 2 * dim;
    cfg.vocab_size = vocab.size();
    cfg.max_seq_len = 32;
    cfg.dropout_rate = 0.0;
    model = EconetModel::init(cfg, std::max(1, evocab.size()), seed);
  }

  std::vector<std::vector<int>> encode(std::span<const MaskedSample> batch) const {
    std::vector<std::vector<int>> out;
    for (const auto& s : batch) out.push_back(vocab.encode(s.tokens));
    return out;
  }
};

}  // namespace

TEST_CASE("uniform logits give ln(40) temporal loss") {
  Setup su;
  const MaskedSample* temporal = nullptr;
  for (const auto& s : su.samples)
    if (s.kind == 1) temporal = &s;
  REQUIRE(temporal != nullptr);
  auto ids = su.vocab.encode(temporal->tokens);
  auto trace = forward(su.model.encoder, ids, false, 0);
  LinearHead zero_head = LinearHead::zeros(su.cfg.hidden_dim, 40);
  auto res = temporal_loss(trace, temporal->mask_pos, temporal->gold_label_id, zero_head);
  CHECK(res.loss == doctest::Approx(std::log(40.0)).epsilon(1e-12));
  CHECK(res.loss == doctest::Approx(3.6888794541139363).epsilon(1e-12));
  for (int i = 0; i < 40; ++i) CHECK(res.probs(i) == doctest::Approx(1.0 / 40).epsilon(1e-12));
}

TEST_CASE("uniform logits give ln(|E|) event loss at |E|=500") {
  Setup su;
  const MaskedSample* event = nullptr;
  for (const auto& s : su.samples)
    if (s.kind == 0) event = &s;
  REQUIRE(event != nullptr);
  auto ids = su.vocab.encode(event->tokens);
  auto trace = forward(su.model.encoder, ids, false, 0);
  LinearHead zero_head = LinearHead::zeros(su.cfg.hidden_dim, 500);
  auto res = event_loss(trace, event->mask_pos, 123, zero_head);
  CHECK(res.loss == doctest::Approx(std::log(500.0)).epsilon(1e-12));
}

TEST_CASE("near one-hot gold drives the loss toward zero") {
  Setup su;
  const MaskedSample& s = su.samples.front();
  auto ids = su.vocab.encode(s.tokens);
  auto trace = forward(su.model.encoder, ids, false, 0);
  LinearHead head = LinearHead::zeros(su.cfg.hidden_dim, 40);
  head.b.setConstant(-50.0);
  head.b(s.gold_label_id) = 50.0;
  auto res = softmax_xent_at(head, trace.final_hidden(), s.mask_pos, s.gold_label_id, nullptr, 1.0);
  CHECK(res.loss < 1e-12);
}

TEST_CASE("label out of range is rejected") {
  Setup su;
  const MaskedSample& s = su.samples.front();
  auto ids = su.vocab.encode(s.tokens);
  auto trace = forward(su.model.encoder, ids, false, 0);
  CHECK_THROWS_AS((void)temporal_loss(trace, s.mask_pos, 40, su.model.heads.temporal), std::out_of_range);
  CHECK_THROWS_AS((void)temporal_loss(trace, s.mask_pos, -1, su.model.heads.temporal), std::out_of_range);
}

TEST_CASE("softmax cross-entropy matches a standalone oracle on random logits") {
  // Oracle path: explicit exp/sum arithmetic on the same logits.
  std::mt19937_64 rng(41);
  std::normal_distribution<double> normal(0.0, 2.0);
  Setup su;
  const int hidden = su.cfg.hidden_dim;
  for (int trial = 0; trial < 100; ++trial) {
    const int classes = 2 + int(rng() % 60);
    LinearHead head = LinearHead::zeros(hidden, classes);
    for (Eigen::Index i = 0; i < head.w.size(); ++i) head.w.data()[i] = normal(rng);
    for (Eigen::Index i = 0; i < head.b.size(); ++i) head.b(i) = normal(rng);
    MatrixXd hrow = MatrixXd::Zero(1, hidden);
    for (int i = 0; i < hidden; ++i) hrow(0, i) = normal(rng);
    const int gold = int(rng() % classes);
    auto res = softmax_xent_at(head, hrow, 0, gold, nullptr, 1.0);

    std::vector<double> logits(classes);
    for (int c = 0; c < classes; ++c) {
      double z = head.b(c);
      for (int i = 0; i < hidden; ++i) z += hrow(0, i) * head.w(i, c);
      logits[c] = z;
    }
    double denom = 0.0;
    for (int c = 0; c < classes; ++c) denom += std::exp(logits[c]);
    double want = -(logits[gold] - std::log(denom));
    CHECK(res.loss == doctest::Approx(want).epsilon(1e-12));
  }
}

TEST_CASE("binary cross-entropy matches a standalone oracle") {
  std::mt19937_64 rng(43);
  std::normal_distribution<double> normal(0.0, 1.5);
  Setup su;
  const int hidden = su.cfg.hidden_dim;
  for (int trial = 0; trial < 100; ++trial) {
    LinearHead head = LinearHead::zeros(hidden, 1);
    for (int i = 0; i < hidden; ++i) head.w(i, 0) = normal(rng);
    head.b(0) = normal(rng);
    MatrixXd hrow = MatrixXd::Zero(1, hidden);
    for (int i = 0; i < hidden; ++i) hrow(0, i) = normal(rng);
    const int y = int(rng() % 2);
    auto res = sigmoid_bce_at(head, hrow, 0, y, nullptr, 1.0);
    double z = head.b(0);
    for (int i = 0; i < hidden; ++i) z += hrow(0, i) * head.w(i, 0);
    double p = 1.0 / (1.0 + std::exp(-z));
    // -log(sigmoid(z)) and -log(1-sigmoid(z)) in cancellation-free form.
    double want = y == 1 ? std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
    CHECK(rel_err(res.loss, want) < 1e-12);
    CHECK(res.prob == doctest::Approx(p).epsilon(1e-12));
  }
}

TEST_CASE("discriminator at D=0.5 scores ln 2 for either label") {
  Setup su;
  LinearHead zero = LinearHead::zeros(su.cfg.hidden_dim, 1);
  MatrixXd hrow = MatrixXd::Random(1, su.cfg.hidden_dim);
  for (int y : {0, 1}) {
    auto res = sigmoid_bce_at(zero, hrow, 0, y, nullptr, 1.0);
    CHECK(res.prob == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(res.loss == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  }
}

TEST_CASE("perturbation at r=0 keeps predictions; correct prediction means y=1") {
  Setup su;
  std::mt19937_64 rng(1);
  for (int i = 0; i < 100; ++i) {
    auto out = perturb_prediction("after", "after", 1, 0.0, rng, su.lex, su.evocab);
    CHECK(out.y == 1);
    CHECK(out.emitted == "after");
    CHECK(!out.replaced);
  }
}

TEST_CASE("perturbation at r=100 replaces everything; y=1 rate matches 1/40") {
  Setup su;
  std::mt19937_64 rng(2);
  const int n = 10000;
  int replaced = 0, y1 = 0;
  for (int i = 0; i < n; ++i) {
    auto out = perturb_prediction("after", "after", 1, 100.0, rng, su.lex, su.evocab);
    replaced += out.replaced ? 1 : 0;
    y1 += out.y;
  }
  CHECK(replaced == n);
  const double p = 1.0 / 40.0;
  const double sigma = std::sqrt(p * (1 - p) / n);
  CHECK(std::abs(double(y1) / n - p) <= 3 * sigma);
}

TEST_CASE("perturbation at r=50 replaces about half") {
  Setup su;
  std::mt19937_64 rng(3);
  const int n = 10000;
  int replaced = 0;
  for (int i = 0; i < n; ++i)
    replaced += perturb_prediction("after", "after", 1, 50.0, rng, su.lex, su.evocab).replaced ? 1 : 0;
  double rate = double(replaced) / n;
  CHECK(rate >= 0.47);
  CHECK(rate <= 0.53);
}

TEST_CASE("near-balance: y=1 fraction matches 0.5a + 0.5/V for a=0.9, V=40") {
  Setup su;
  std::mt19937_64 rng(4);
  const int n = 10000;
  int y1 = 0;
  for (int i = 0; i < n; ++i) {
    // Synthetic generator with accuracy 0.9 over the 40-entry lexicon.
    std::string gold = su.lex.indicator(int(rng() % 40));
    std::string predicted;
    if (std::uniform_real_distribution<double>(0, 1)(rng) < 0.9) {
      predicted = gold;
    } else {
      do {
        predicted = su.lex.indicator(int(rng() % 40));
      } while (predicted == gold);
    }
    y1 += perturb_prediction(predicted, gold, 1, 50.0, rng, su.lex, su.evocab).y;
  }
  const double expected = 0.5 * 0.9 + 0.5 / 40.0;
  const double sigma = std::sqrt(expected * (1 - expected) / n);
  CHECK(std::abs(double(y1) / n - expected) <= 3 * sigma);
}

TEST_CASE("empty replacement vocabulary is an error") {
  Setup su;
  EventVocabulary empty;
  std::mt19937_64 rng(5);
  CHECK_THROWS(perturb_prediction("attacked", "attacked", 0, 100.0, rng, su.lex, empty));
}

TEST_CASE("discriminator instances: y=1 iff the filled token equals gold") {
  Setup su;
  std::mt19937_64 rng(6);
  auto encoded = su.encode(su.samples);
  auto instances =
      prepare_disc_instances(su.model, su.samples, encoded, 50.0, rng, su.vocab, su.lex, su.evocab);
  REQUIRE(instances.size() == su.samples.size());
  for (size_t i = 0; i < instances.size(); ++i) {
    const int filled = instances[i].filled_ids[instances[i].position];
    const int gold_id = su.vocab.id(su.samples[i].gold);
    CHECK((instances[i].y == 1) == (filled == gold_id));
  }
}

TEST_CASE("temporal-only batch: zero event loss and zero event-head gradients") {
  Setup su;
  std::vector<MaskedSample> batch;
  for (const auto& s : su.samples)
    if (s.kind == 1) batch.push_back(s);
  REQUIRE(batch.size() >= 2);
  batch.resize(2);
  auto encoded = su.encode(batch);
  std::mt19937_64 rng(7);
  auto instances = prepare_disc_instances(su.model, batch, encoded, 50.0, rng, su.vocab, su.lex, su.evocab);
  EconetModel grads = EconetModel::zeros(su.cfg, su.model.heads.event.out_dim());
  auto breakdown = joint_loss(su.model, batch, encoded, instances, 0.7, 1.0, false, 0, &grads);
  CHECK(breakdown.l_event == 0.0);
  CHECK((grads.heads.event.w.array() == 0.0).all());
  CHECK((grads.heads.event.b.array() == 0.0).all());
}

TEST_CASE("alpha=0 and beta=0 reduce the joint loss to the temporal term") {
  Setup su;
  std::vector<MaskedSample> batch(su.samples.begin(), su.samples.begin() + 4);
  auto encoded = su.encode(batch);
  auto breakdown = joint_loss(su.model, batch, encoded, {}, 0.0, 0.0, false, 0, nullptr);
  CHECK(breakdown.l_joint == breakdown.l_temporal);
}

TEST_CASE("loss breakdown additivity holds with arbitrary weights") {
  Setup su;
  std::vector<MaskedSample> batch(su.samples.begin(), su.samples.begin() + 6);
  auto encoded = su.encode(batch);
  std::mt19937_64 rng(8);
  auto instances = prepare_disc_instances(su.model, batch, encoded, 50.0, rng, su.vocab, su.lex, su.evocab);
  auto b = joint_loss(su.model, batch, encoded, instances, 0.35, 2.25, false, 0, nullptr);
  CHECK(std::abs(b.l_joint - (b.l_temporal + 0.35 * b.l_event + 2.25 * b.l_disc)) < 1e-9);
}

TEST_CASE("joint gradients match finite differences (sampled blocks)") {
  Setup su(16, 11, /*layers=*/1, /*heads=*/1, /*dim=*/8);
  std::vector<MaskedSample> batch;
  int want_t = 2, want_e = 2;
  for (const auto& s : su.samples) {
    if (s.kind == 1 && want_t > 0) {
      batch.push_back(s);
      --want_t;
    } else if (s.kind == 0 && want_e > 0) {
      batch.push_back(s);
      --want_e;
    }
  }
  REQUIRE(batch.size() == 4);
  auto encoded = su.encode(batch);
  std::mt19937_64 rng(9);
  auto instances = prepare_disc_instances(su.model, batch, encoded, 50.0, rng, su.vocab, su.lex, su.evocab);

  EconetModel grads = EconetModel::zeros(su.cfg, su.model.heads.event.out_dim());
  (void)joint_loss(su.model, batch, encoded, instances, 1.0, 1.0, false, 0, &grads);

  auto loss_of = [&](const EconetModel& m) {
    return joint_loss(m, batch, encoded, instances, 1.0, 1.0, false, 0, nullptr).l_joint;
  };
  const double h = 1e-5;
  double max_err = 0.0;
  auto pv = tensor_views(su.model);
  auto gv = tensor_views(grads);
  for (size_t b = 0; b < pv.size(); ++b) {
    Eigen::Index stride = std::max<Eigen::Index>(1, pv[b].size / 5);
    for (Eigen::Index i = 0; i < pv[b].size; i += stride) {
      double saved = pv[b].data[i];
      pv[b].data[i] = saved + h;
      double up = loss_of(su.model);
      pv[b].data[i] = saved - h;
      double down = loss_of(su.model);
      pv[b].data[i] = saved;
      max_err = std::max(max_err, rel_err((up - down) / (2 * h), gv[b].data[i]));
    }
  }
  INFO("max relative error ", max_err);
  CHECK(max_err < 1e-4);
}

TEST_CASE("both generator and discriminator paths reach the shared encoder") {
  Setup su;
  std::vector<MaskedSample> batch(su.samples.begin(), su.samples.begin() + 4);
  auto encoded = su.encode(batch);
  std::mt19937_64 rng(10);
  auto instances = prepare_disc_instances(su.model, batch, encoded, 50.0, rng, su.vocab, su.lex, su.evocab);

  // Generator path only.
  EconetModel gen_grads = EconetModel::zeros(su.cfg, su.model.heads.event.out_dim());
  (void)joint_loss(su.model, batch, encoded, {}, 1.0, 0.0, false, 0, &gen_grads);
  // Discriminator path only, replayed by hand on the first instance.
  EconetModel disc_grads = EconetModel::zeros(su.cfg, su.model.heads.event.out_dim());
  ForwardCache cache;
  auto trace = forward(su.model.encoder, instances[0].filled_ids, false, 0, &cache);
  auto disc = sigmoid_bce_at(su.model.heads.disc, trace.final_hidden(), instances[0].position,
                             instances[0].y, &disc_grads.heads.disc, 1.0);
  MatrixXd d_final = MatrixXd::Zero(trace.final_hidden().rows(), trace.final_hidden().cols());
  d_final.row(instances[0].position) = disc.d_hidden.transpose();
  backward(su.model.encoder, cache, d_final, disc_grads.encoder);

  bool both = false;
  auto ga = tensor_views(gen_grads.encoder);
  auto gb = tensor_views(disc_grads.encoder);
  for (size_t b = 0; b < ga.size() && !both; ++b)
    for (Eigen::Index i = 0; i < ga[b].size && !both; ++i)
      if (ga[b].data[i] != 0.0 && gb[b].data[i] != 0.0) both = true;
  CHECK(both);
}

TEST_CASE("pretraining overfits a small synthetic set") {
  PretrainRunConfig cfg;
  cfg.model.n_layers = 2;
  cfg.model.n_heads = 2;
  cfg.model.hidden_dim = 48;
  cfg.model.ffn_dim = 96;
  cfg.model.max_seq_len = 32;
  cfg.model.dropout_rate = 0.0;
  cfg.mode = PretrainMode::econet;
  cfg.lr = 3e-3;
  cfg.batch_size = 8;
  cfg.seed = 5;

  auto lex = TemporalLexicon::load_default();
  auto tagger = EventTagger::with_default_lexicon();
  auto built = build_corpus(toy_documents(64, 21), lex, tagger, CorpusBuildOptions{.budget = 64});
  REQUIRE(built.samples.size() == 64);

  Trainer trainer(cfg, built.samples);
  double initial = 0.0, final = 0.0;
  for (int i = 0; i < 500; ++i) {
    auto row = trainer.step();
    if (i == 0) initial = row.breakdown.l_temporal;
    final = row.breakdown.l_temporal;
    CHECK(std::abs(row.breakdown.l_joint - (row.breakdown.l_temporal + cfg.alpha * row.breakdown.l_event +
                                            cfg.beta * row.breakdown.l_disc)) < 1e-9);
  }
  INFO("temporal loss ", initial, " -> ", final);
  CHECK(final < 0.1 * initial);
}

TEST_CASE("generator-only mode logs zero discriminator loss at every step") {
  PretrainRunConfig cfg;
  cfg.model.n_layers = 1;
  cfg.model.n_heads = 1;
  cfg.model.hidden_dim = 16;
  cfg.model.ffn_dim = 32;
  cfg.model.max_seq_len = 32;
  cfg.model.dropout_rate = 0.0;
  cfg.mode = PretrainMode::generator_only;
  cfg.batch_size = 4;

  auto lex = TemporalLexicon::load_default();
  auto tagger = EventTagger::with_default_lexicon();
  auto built = build_corpus(toy_documents(16, 31), lex, tagger, {});
  Trainer trainer(cfg, built.samples);
  auto disc_before = trainer.model().heads.disc;
  for (int i = 0; i < 25; ++i) {
    auto row = trainer.step();
    CHECK(row.breakdown.l_disc == 0.0);
    CHECK(row.disc_accuracy == 0.0);
  }
  // Frozen head: no updates ever reach it.
  CHECK((trainer.model().heads.disc.w.array() == disc_before.w.array()).all());
  CHECK((trainer.model().heads.disc.b.array() == disc_before.b.array()).all());
}

TEST_CASE("random-mask mode runs Eq.-style masking and learns") {
  PretrainRunConfig cfg;
  cfg.model.n_layers = 1;
  cfg.model.n_heads = 2;
  cfg.model.hidden_dim = 32;
  cfg.model.ffn_dim = 64;
  cfg.model.max_seq_len = 32;
  cfg.model.dropout_rate = 0.0;
  cfg.mode = PretrainMode::random_mask;
  cfg.batch_size = 8;
  cfg.lr = 1e-3;

  auto lex = TemporalLexicon::load_default();
  auto tagger = EventTagger::with_default_lexicon();
  auto built = build_corpus(toy_documents(16, 41), lex, tagger, {});
  Trainer trainer(cfg, built.samples);
  double initial = 0.0, final = 0.0;
  for (int i = 0; i < 200; ++i) {
    auto row = trainer.step();
    if (i == 0) initial = row.breakdown.l_joint;
    final = row.breakdown.l_joint;
    CHECK(row.breakdown.l_event == 0.0);
    CHECK(row.breakdown.l_disc == 0.0);
  }
  INFO("mlm loss ", initial, " -> ", final);
  CHECK(final < 0.5 * initial);
}

TEST_CASE("checkpoint save/load round-trips bit-exactly") {
  Setup su;
  PretrainCheckpoint ckpt;
  ckpt.config = su.cfg;
  ckpt.model = su.model;
  ckpt.vocab = su.vocab;
  ckpt.event_vocab = su.evocab;
  ckpt.lexicon = su.lex;
  ckpt.step = 17;
  std::mt19937_64 rng(12345);
  rng.discard(100);
  std::ostringstream os;
  os << rng;
  ckpt.rng_state = os.str();

  std::string path = "ckpt_roundtrip.bin";
  save_pretrain_checkpoint(path, ckpt);
  auto loaded = load_pretrain_checkpoint(path);
  CHECK(loaded.step == 17);
  CHECK(loaded.rng_state == ckpt.rng_state);
  CHECK(loaded.vocab.size() == su.vocab.size());
  CHECK(loaded.event_vocab.size() == su.evocab.size());
  CHECK(loaded.lexicon.size() == su.lex.size());
  auto a = tensor_views(ckpt.model);
  auto b = tensor_views(loaded.model);
  REQUIRE(a.size() == b.size());
  for (size_t i = 0; i < a.size(); ++i) {
    REQUIRE(a[i].size == b[i].size);
    for (Eigen::Index j = 0; j < a[i].size; ++j) CHECK(a[i].data[j] == b[i].data[j]);
  }
  std::remove(path.c_str());
}

TEST_CASE("resume from checkpoint continues the trajectory bit-identically") {
  PretrainRunConfig cfg;
  cfg.model.n_layers = 1;
  cfg.model.n_heads = 1;
  cfg.model.hidden_dim = 16;
  cfg.model.ffn_dim = 32;
  cfg.model.max_seq_len = 32;
  cfg.model.dropout_rate = 0.1;
  cfg.mode = PretrainMode::econet;
  cfg.batch_size = 4;
  cfg.seed = 99;

  auto lex = TemporalLexicon::load_default();
  auto tagger = EventTagger::with_default_lexicon();
  auto built = build_corpus(toy_documents(16, 51), lex, tagger, {});

  Trainer a(cfg, built.samples);
  for (int i = 0; i < 10; ++i) (void)a.step();
  auto ckpt = a.make_checkpoint(true);
  std::string path = "ckpt_resume.bin";
  save_pretrain_checkpoint(path, ckpt);

  std::vector<std::string> rows_a;
  for (int i = 0; i < 15; ++i) rows_a.push_back(loss_log_csv(a.step()));

  auto loaded = load_pretrain_checkpoint(path);
  Trainer b(loaded, cfg, built.samples);
  CHECK(b.current_step() == 10);
  std::vector<std::string> rows_b;
  for (int i = 0; i < 15; ++i) rows_b.push_back(loss_log_csv(b.step()));
  CHECK(rows_a == rows_b);
  std::remove(path.c_str());
}

TEST_CASE("empty batch is rejected") {
  Setup su;
  AdamState<EconetModel> opt = AdamState<EconetModel>::zeros_like(su.cfg, su.model.heads.event.out_dim());
  std::mt19937_64 rng(1);
  StepOptions opts;
  CHECK_THROWS_AS(
      (void)joint_step(su.model, opt, {}, opts, rng, su.vocab, su.lex, su.evocab),
      std::invalid_argument);
}

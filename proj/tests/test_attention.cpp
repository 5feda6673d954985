#include <random>
#include <vector>

#include "doctest.h"
#include "econet/attention.hpp"
#include "econet/synth.hpp"
#include "econet/task_heads.hpp"

using namespace econet;

namespace {

// Trace with hand-filled attention probabilities.
ForwardTrace handmade_trace(int layers, int heads, int n, std::mt19937_64* rng = nullptr) {
  ForwardTrace trace;
  trace.attention.assign(layers, {});
  for (int l = 0; l < layers; ++l) {
    trace.attention[l].assign(heads, MatrixXd::Zero(n, n));
    for (int h = 0; h < heads; ++h) {
      for (int q = 0; q < n; ++q) {
        Eigen::RowVectorXd row(n);
        for (int k = 0; k < n; ++k) row(k) = rng ? std::uniform_real_distribution<double>(0.01, 1.0)(*rng) : 1.0;
        trace.attention[l][h].row(q) = row / row.sum();
      }
    }
  }
  for (int l = 0; l <= layers; ++l) trace.hidden_states.emplace_back(MatrixXd::Zero(n, 4));
  return trace;
}

ModelConfig analysis_config(int vocab_size) {
  ModelConfig cfg;
  cfg.n_layers = 3;
  cfg.n_heads = 2;
  cfg.hidden_dim = 16;
  cfg.ffn_dim = 32;
  cfg.vocab_size = vocab_size;
  cfg.max_seq_len = 48;
  cfg.dropout_rate = 0.0;
  return cfg;
}

}  // namespace

TEST_CASE("single head, single-token indicator returns the raw probability") {
  auto trace = handmade_trace(1, 1, 4);
  trace.attention[0][0](2, 1) = 0.37;
  CHECK(event_indicator_attention(trace, 2, 1, 2, 0) == 0.37);
}

TEST_CASE("two-token span averages the per-position values") {
  auto trace = handmade_trace(1, 1, 4);
  trace.attention[0][0](0, 1) = 0.1;
  trace.attention[0][0](0, 2) = 0.3;
  CHECK(event_indicator_attention(trace, 0, 1, 3, 0) == doctest::Approx(0.2).epsilon(1e-15));
}

TEST_CASE("pair attention averages the two event scores") {
  auto trace = handmade_trace(1, 1, 6);
  // Force i-score 0.2 and j-score 0.4 on span [3,4).
  trace.attention[0][0](1, 3) = 0.2;
  trace.attention[0][0](2, 3) = 0.4;
  CHECK(pair_attention(trace, 1, 2, 3, 4, 0) == doctest::Approx(0.3).epsilon(1e-15));
}

TEST_CASE("position validation") {
  auto trace = handmade_trace(2, 2, 5);
  CHECK_THROWS(event_indicator_attention(trace, 5, 0, 1, 0));
  CHECK_THROWS(event_indicator_attention(trace, 0, 4, 6, 0));
  CHECK_THROWS(event_indicator_attention(trace, 0, 2, 2, 0));
  CHECK_THROWS(event_indicator_attention(trace, 0, 0, 1, 2));
}

TEST_CASE("agreement with a brute-force loop over heads and span positions") {
  std::mt19937_64 rng(71);
  for (int trial = 0; trial < 100; ++trial) {
    const int layers = 1 + int(rng() % 3);
    const int heads = 1 + int(rng() % 4);
    const int n = 3 + int(rng() % 8);
    auto trace = handmade_trace(layers, heads, n, &rng);
    const int pos = int(rng() % n);
    const int b = int(rng() % (n - 1));
    const int e = b + 1 + int(rng() % (n - b - 1));
    const int l = int(rng() % layers);
    double got = event_indicator_attention(trace, pos, b, e, l);
    double want = 0.0;
    for (int h = 0; h < heads; ++h)
      for (int k = b; k < e; ++k) want += trace.attention[l][h](pos, k);
    want /= double(heads) * double(e - b);
    CHECK(got == doctest::Approx(want).epsilon(1e-12));
  }
}

TEST_CASE("category report equals a brute-force recomputation") {
  auto data = synth_ere(40, 81);
  TaskData td;
  td.kind = TaskKind::ere;
  td.labels = data.labels;
  td.ere = data.examples;
  auto lex = TemporalLexicon::load_default();
  auto vocab = vocabulary_from_task(td, lex);
  auto encoder = MiniLmParameters::init(analysis_config(vocab.size()), 5);

  auto report = category_report(data.examples, encoder, vocab, lex);

  // Independent recomputation straight from traces.
  const int L = encoder.config.n_layers;
  std::vector<std::vector<double>> sums(lex.category_count(), std::vector<double>(L, 0.0));
  std::vector<long> counts(lex.category_count(), 0);
  for (const auto& ex : data.examples) {
    auto matches = lex.find_indicators(ex.passage);
    if (matches.empty()) continue;
    auto trace = forward(encoder, vocab.encode(ex.passage), false, 0);
    const int H = encoder.config.n_heads;
    for (const auto& m : matches) {
      ++counts[m.category_id];
      for (int l = 0; l < L; ++l) {
        double a_i = 0.0, a_j = 0.0;
        for (int h = 0; h < H; ++h) {
          double si = 0.0, sj = 0.0;
          for (int k = m.begin; k < m.end; ++k) {
            si += trace.attention[l][h](ex.i, k);
            sj += trace.attention[l][h](ex.j, k);
          }
          a_i += si / double(m.end - m.begin);
          a_j += sj / double(m.end - m.begin);
        }
        sums[m.category_id][l] += 0.5 * (a_i / H + a_j / H);
      }
    }
  }
  for (int c = 0; c < lex.category_count(); ++c) {
    CHECK(report.counts[c] == counts[c]);
    if (counts[c] == 0) continue;
    double running = 0.0;
    for (int l = 0; l < L; ++l) {
      const double mean = sums[c][l] / double(counts[c]) * 100.0;
      running += sums[c][l] / double(counts[c]);
      CHECK(report.mean(c, l) == doctest::Approx(mean).epsilon(1e-12));
      CHECK(report.cumulative(c, l) == doctest::Approx(running * 100.0).epsilon(1e-12));
    }
    // Cumulative series is non-decreasing and ends at the layer sum.
    for (int l = 1; l < L; ++l) CHECK(report.cumulative(c, l) >= report.cumulative(c, l - 1));
    double total = 0.0;
    for (int l = 0; l < L; ++l) total += report.mean(c, l);
    CHECK(report.cumulative(c, L - 1) == doctest::Approx(total).epsilon(1e-12));
  }
}

TEST_CASE("one example with one indicator reproduces pair_attention") {
  EREExample ex;
  ex.example_id = "e";
  ex.passage = {"the", "army", "attacked", "before", "the", "senate", "voted", "."};
  ex.i = 2;
  ex.j = 6;
  ex.relation = 0;
  auto lex = TemporalLexicon::load_default();
  TaskData td;
  td.kind = TaskKind::ere;
  td.ere = {ex};
  auto vocab = vocabulary_from_task(td, lex);
  auto encoder = MiniLmParameters::init(analysis_config(vocab.size()), 9);
  auto report = category_report(td.ere, encoder, vocab, lex);
  auto trace = forward(encoder, vocab.encode(ex.passage), false, 0);
  for (int l = 0; l < encoder.config.n_layers; ++l) {
    double want = pair_attention(trace, ex.i, ex.j, 3, 4, l) * 100.0;
    CHECK(report.mean(0, l) == doctest::Approx(want).epsilon(1e-12));
  }
  CHECK(report.counts[0] == 1);
  for (int c = 1; c < lex.category_count(); ++c) CHECK(report.counts[c] == 0);
}

TEST_CASE("uniform attention scores exactly 1/seq_len per layer") {
  EREExample ex;
  ex.passage = {"the", "army", "attacked", "before", "the", "senate", "voted", "."};  // n = 8
  ex.i = 2;
  ex.j = 6;
  ex.relation = 0;
  ex.example_id = "u";
  auto lex = TemporalLexicon::load_default();
  TaskData td;
  td.kind = TaskKind::ere;
  td.ere = {ex};
  auto vocab = vocabulary_from_task(td, lex);
  auto encoder = MiniLmParameters::init(analysis_config(vocab.size()), 13);
  // All-equal attention logits: zero query projections.
  for (auto& layer : encoder.layers) {
    layer.wq.setZero();
    layer.bq.setZero();
  }
  auto report = category_report(td.ere, encoder, vocab, lex);
  for (int l = 0; l < encoder.config.n_layers; ++l)
    CHECK(report.mean(0, l) == 100.0 * (1.0 / 8.0));
}

TEST_CASE("report is invariant to example order") {
  auto data = synth_ere(12, 91);
  auto lex = TemporalLexicon::load_default();
  TaskData td;
  td.kind = TaskKind::ere;
  td.ere = data.examples;
  auto vocab = vocabulary_from_task(td, lex);
  auto encoder = MiniLmParameters::init(analysis_config(vocab.size()), 17);
  auto a = category_report(data.examples, encoder, vocab, lex);
  std::reverse(data.examples.begin(), data.examples.end());
  auto b = category_report(data.examples, encoder, vocab, lex);
  CHECK(a.counts == b.counts);
  for (Eigen::Index c = 0; c < a.mean.rows(); ++c)
    for (Eigen::Index l = 0; l < a.mean.cols(); ++l)
      CHECK(a.mean(c, l) == doctest::Approx(b.mean(c, l)).epsilon(1e-12));
}

TEST_CASE("averaging identical reports is the identity") {
  auto data = synth_ere(6, 95);
  auto lex = TemporalLexicon::load_default();
  TaskData td;
  td.kind = TaskKind::ere;
  td.ere = data.examples;
  auto vocab = vocabulary_from_task(td, lex);
  auto encoder = MiniLmParameters::init(analysis_config(vocab.size()), 19);
  auto r = category_report(data.examples, encoder, vocab, lex);
  std::vector<AttentionReport> reports = {r, r};
  auto avg = average_reports(reports);
  CHECK(avg.counts == r.counts);
  for (Eigen::Index c = 0; c < r.mean.rows(); ++c)
    for (Eigen::Index l = 0; l < r.mean.cols(); ++l)
      CHECK(avg.mean(c, l) == doctest::Approx(r.mean(c, l)).epsilon(1e-15));
}

TEST_CASE("heatmap: identical predictions give an all-zero matrix") {
  auto data = synth_ere(30, 99);
  auto lex = TemporalLexicon::load_default();
  std::vector<int> preds;
  for (const auto& ex : data.examples) preds.push_back(ex.relation);
  auto result = heatmap_deltas(data.examples, preds, preds, data.labels, lex, 1);
  REQUIRE(!result.categories.empty());
  CHECK(result.deltas.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("heatmap drops categories below the sample threshold") {
  auto lex = TemporalLexicon::load_default();
  LabelSet labels;
  labels.names = {"BEFORE", "AFTER"};
  std::vector<EREExample> examples;
  std::vector<int> pa, pb;
  // 49 'before' examples and 50 'after' examples.
  for (int k = 0; k < 99; ++k) {
    EREExample ex;
    ex.example_id = "h" + std::to_string(k);
    const bool is_before = k < 49;
    ex.passage = {"the", "army", "attacked", is_before ? "before" : "after", "the", "senate", "voted", "."};
    ex.i = 2;
    ex.j = 6;
    ex.relation = is_before ? 0 : 1;
    examples.push_back(ex);
    pa.push_back(0);
    pb.push_back(ex.relation);
  }
  auto result = heatmap_deltas(examples, pa, pb, labels, lex, 50);
  REQUIRE(result.categories.size() == 1);
  CHECK(result.categories[0] == "after");
  CHECK(result.counts[0] == 50);
}

TEST_CASE("heatmap matches a hand-computed fixture") {
  auto lex = TemporalLexicon::load_default();
  LabelSet labels;
  labels.names = {"BEFORE", "AFTER"};
  // Category 'before': two examples with gold {0, 1}.
  //   a predicts {0, 0}: class0 tp=1 fp=1 fn=0 -> F1 = 2/3; class1 F1 = 0.
  //   b predicts {0, 1}: both perfect -> class0 F1 = 1, class1 F1 = 1.
  // Deltas: class0 = 1 - 2/3 = 1/3, class1 = 1 - 0 = 1.
  std::vector<EREExample> examples(2);
  std::vector<int> pa = {0, 0}, pb = {0, 1};
  for (int k = 0; k < 2; ++k) {
    examples[k].example_id = "f" + std::to_string(k);
    examples[k].passage = {"the", "army", "attacked", "before", "the", "senate", "voted", "."};
    examples[k].i = 2;
    examples[k].j = 6;
    examples[k].relation = k;
  }
  auto result = heatmap_deltas(examples, pa, pb, labels, lex, 1);
  REQUIRE(result.categories.size() == 1);
  CHECK(result.categories[0] == "before");
  CHECK(result.deltas(0, 0) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(result.deltas(0, 1) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("heatmap rejects mismatched prediction sets") {
  auto data = synth_ere(5, 103);
  auto lex = TemporalLexicon::load_default();
  std::vector<int> preds(4, 0);
  std::vector<int> full(5, 0);
  CHECK_THROWS(heatmap_deltas(data.examples, preds, full, data.labels, lex, 1));
}

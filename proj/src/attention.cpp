#include "econet/attention.hpp"

#include <cstdio>
#include <stdexcept>

namespace econet {

double event_indicator_attention(const ForwardTrace& trace, int event_pos, int span_begin, int span_end,
                                 int layer) {
  if (layer < 0 || layer >= (int)trace.attention.size()) throw std::out_of_range("layer out of range");
  const auto& heads = trace.attention[layer];
  const int n = (int)heads.front().rows();
  if (event_pos < 0 || event_pos >= n) throw std::out_of_range("event position out of range");
  if (span_begin < 0 || span_end > n || span_begin >= span_end)
    throw std::out_of_range("indicator span out of range");
  double sum_heads = 0.0;
  for (const auto& attn : heads) {
    double span_sum = 0.0;
    for (int k = span_begin; k < span_end; ++k) span_sum += attn(event_pos, k);
    sum_heads += span_sum / double(span_end - span_begin);
  }
  return sum_heads / double(heads.size());
}

double pair_attention(const ForwardTrace& trace, int i, int j, int span_begin, int span_end, int layer) {
  return 0.5 * (event_indicator_attention(trace, i, span_begin, span_end, layer) +
                event_indicator_attention(trace, j, span_begin, span_end, layer));
}

AttentionReport category_report(std::span<const EREExample> examples, const MiniLmParameters& encoder,
                                const Vocabulary& vocab, const TemporalLexicon& lexicon) {
  const int n_layers = encoder.config.n_layers;
  const int n_categories = lexicon.category_count();
  AttentionReport report;
  for (int c = 0; c < n_categories; ++c) report.categories.push_back(lexicon.category_name(c));
  report.counts.assign(n_categories, 0);
  MatrixXd sums = MatrixXd::Zero(n_categories, n_layers);

  for (const auto& ex : examples) {
    auto matches = lexicon.find_indicators(ex.passage);
    if (matches.empty()) continue;
    auto ids = vocab.encode(ex.passage);
    auto trace = forward(encoder, ids, false, 0);
    for (const auto& m : matches) {
      ++report.counts[m.category_id];
      for (int l = 0; l < n_layers; ++l)
        sums(m.category_id, l) += pair_attention(trace, ex.i, ex.j, m.begin, m.end, l);
    }
  }

  report.mean = MatrixXd::Zero(n_categories, n_layers);
  report.cumulative = MatrixXd::Zero(n_categories, n_layers);
  for (int c = 0; c < n_categories; ++c) {
    if (report.counts[c] == 0) continue;
    double running = 0.0;
    for (int l = 0; l < n_layers; ++l) {
      const double mean = sums(c, l) / double(report.counts[c]);
      running += mean;
      report.mean(c, l) = mean * 100.0;
      report.cumulative(c, l) = running * 100.0;
    }
  }
  return report;
}

AttentionReport average_reports(std::span<const AttentionReport> reports) {
  if (reports.empty()) throw std::invalid_argument("average_reports: no reports");
  AttentionReport out = reports.front();
  for (size_t r = 1; r < reports.size(); ++r) {
    const auto& rep = reports[r];
    if (rep.categories != out.categories || rep.mean.cols() != out.mean.cols())
      throw std::invalid_argument("average_reports: reports do not align");
    if (rep.counts != out.counts)
      throw std::invalid_argument("average_reports: reports cover different samples");
    out.mean += rep.mean;
    out.cumulative += rep.cumulative;
  }
  out.mean /= double(reports.size());
  out.cumulative /= double(reports.size());
  return out;
}

std::string attention_report_csv(const AttentionReport& report) {
  std::string csv = "category,layer,mean,cumulative,count\n";
  char buf[160];
  for (size_t c = 0; c < report.categories.size(); ++c) {
    if (report.counts[c] == 0) continue;
    for (Eigen::Index l = 0; l < report.mean.cols(); ++l) {
      std::snprintf(buf, sizeof(buf), "%s,%ld,%.17g,%.17g,%ld\n", report.categories[c].c_str(), long(l + 1),
                    report.mean(c, l), report.cumulative(c, l), report.counts[c]);
      csv += buf;
    }
  }
  return csv;
}

nlohmann::ordered_json attention_report_json(const AttentionReport& report) {
  nlohmann::ordered_json j = nlohmann::ordered_json::array();
  for (size_t c = 0; c < report.categories.size(); ++c) {
    if (report.counts[c] == 0) continue;
    nlohmann::ordered_json row;
    row["category"] = report.categories[c];
    row["count"] = report.counts[c];
    row["mean"] = std::vector<double>(report.mean.row(c).begin(), report.mean.row(c).end());
    row["cumulative"] =
        std::vector<double>(report.cumulative.row(c).begin(), report.cumulative.row(c).end());
    j.push_back(std::move(row));
  }
  return j;
}

namespace {

// One-vs-rest F1 for label r over (gold, pred) pairs; 0 when undefined.
double class_f1(std::span<const int> gold, std::span<const int> pred, int r) {
  long tp = 0, fp = 0, fn = 0;
  for (size_t i = 0; i < gold.size(); ++i) {
    if (gold[i] == r && pred[i] == r) ++tp;
    if (gold[i] != r && pred[i] == r) ++fp;
    if (gold[i] == r && pred[i] != r) ++fn;
  }
  const long denom = 2 * tp + fp + fn;
  return denom == 0 ? 0.0 : 2.0 * double(tp) / double(denom);
}

}  // namespace

HeatmapResult heatmap_deltas(std::span<const EREExample> examples, std::span<const int> predictions_a,
                             std::span<const int> predictions_b, const LabelSet& labels,
                             const TemporalLexicon& lexicon, long min_samples) {
  if (examples.size() != predictions_a.size() || examples.size() != predictions_b.size())
    throw std::invalid_argument("heatmap_deltas: prediction sets do not cover the same examples");
  const int n_categories = lexicon.category_count();
  std::vector<std::vector<size_t>> members(n_categories);
  for (size_t i = 0; i < examples.size(); ++i) {
    auto matches = lexicon.find_indicators(examples[i].passage);
    std::vector<bool> seen(n_categories, false);
    for (const auto& m : matches) {
      if (seen[m.category_id]) continue;  // one count per example per category
      seen[m.category_id] = true;
      members[m.category_id].push_back(i);
    }
  }

  HeatmapResult result;
  result.labels = labels.names;
  std::vector<int> retained;
  for (int c = 0; c < n_categories; ++c)
    if ((long)members[c].size() >= min_samples) retained.push_back(c);
  result.deltas = MatrixXd::Zero((Eigen::Index)retained.size(), labels.size());
  for (size_t row = 0; row < retained.size(); ++row) {
    const int c = retained[row];
    result.categories.push_back(lexicon.category_name(c));
    result.counts.push_back((long)members[c].size());
    std::vector<int> gold, pa, pb;
    for (size_t idx : members[c]) {
      gold.push_back(examples[idx].relation);
      pa.push_back(predictions_a[idx]);
      pb.push_back(predictions_b[idx]);
    }
    for (int r = 0; r < labels.size(); ++r)
      result.deltas((Eigen::Index)row, r) = class_f1(gold, pb, r) - class_f1(gold, pa, r);
  }
  return result;
}

nlohmann::ordered_json heatmap_json(const HeatmapResult& result) {
  nlohmann::ordered_json j;
  j["labels"] = result.labels;
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (size_t c = 0; c < result.categories.size(); ++c) {
    nlohmann::ordered_json row;
    row["category"] = result.categories[c];
    row["count"] = result.counts[c];
    row["deltas"] = std::vector<double>(result.deltas.row(c).begin(), result.deltas.row(c).end());
    rows.push_back(std::move(row));
  }
  j["rows"] = std::move(rows);
  return j;
}

}  // namespace econet

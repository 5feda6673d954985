#pragma once

#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "econet/lexicon.hpp"
#include "econet/minilm.hpp"
#include "econet/task_types.hpp"
#include "econet/vocab.hpp"

namespace econet {

// Head-averaged attention from the event position onto an indicator
// span at one layer; multi-token spans average over their positions.
double event_indicator_attention(const ForwardTrace& trace, int event_pos, int span_begin, int span_end,
                                 int layer);

// Mean of the two events' scores onto the same indicator span.
double pair_attention(const ForwardTrace& trace, int i, int j, int span_begin, int span_end, int layer);

// Per-category attention aggregation. Scores carry the x100 display
// scaling; cumulative is the running sum over layers 1..l. Categories
// with no matched instances are omitted (count stays 0).
struct AttentionReport {
  std::vector<std::string> categories;        // all lexicon categories, in order
  std::vector<long> counts;                   // contributing (example, indicator) pairs
  MatrixXd mean;                              // category x layer, x100
  MatrixXd cumulative;                        // category x layer, x100
};

AttentionReport category_report(std::span<const EREExample> examples, const MiniLmParameters& encoder,
                                const Vocabulary& vocab, const TemporalLexicon& lexicon);

// Mean of per-checkpoint reports (identical category sets and layer
// counts required); counts must agree across reports.
AttentionReport average_reports(std::span<const AttentionReport> reports);

std::string attention_report_csv(const AttentionReport& report);
nlohmann::ordered_json attention_report_json(const AttentionReport& report);

// Category x label-class F1 deltas between two prediction sets over the
// same examples; cell = F1_b - F1_a on the subset of examples whose
// passage contains an indicator of the category. Categories with fewer
// than min_samples matching examples are dropped.
struct HeatmapResult {
  std::vector<std::string> categories;  // retained categories
  std::vector<long> counts;
  std::vector<std::string> labels;
  MatrixXd deltas;  // category x label
};

HeatmapResult heatmap_deltas(std::span<const EREExample> examples, std::span<const int> predictions_a,
                             std::span<const int> predictions_b, const LabelSet& labels,
                             const TemporalLexicon& lexicon, long min_samples = 50);

nlohmann::ordered_json heatmap_json(const HeatmapResult& result);

}  // namespace econet

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "econet/run_config.hpp"

namespace econet {

struct BuildCorpusArgs {
  std::string input_dir;
  std::string out_path;
  std::optional<std::string> lexicon_path;
  std::optional<std::string> event_lexicon_path;
  std::optional<std::string> exclusion_path;
  long budget = -1;
};
void cmd_build_corpus(const BuildCorpusArgs& args);

struct PretrainArgs {
  RunConfig config;
  std::string corpus_path;
  std::string out_dir;
  std::optional<std::string> resume_checkpoint;
};
// Writes loss_log.csv, periodic + final checkpoints, and the resolved
// config; returns the final checkpoint path.
std::string cmd_pretrain(const PretrainArgs& args);

struct FinetuneArgs {
  RunConfig config;
  std::string checkpoint_path;  // pretrain checkpoint; empty = random init
  std::string data_dir;         // train.jsonl, dev.jsonl, labels.json (ere)
  std::string out_dir;
};
// Runs every configured seed, writes per-seed dev logs, a summary with
// mean/std, and the best seed's task checkpoint; returns its path.
std::string cmd_finetune(const FinetuneArgs& args);

struct EvaluateArgs {
  std::string checkpoint_path;  // finetune checkpoint
  std::string data_path;
  std::optional<std::string> labels_path;
  std::string out_dir;
};
void cmd_evaluate(const EvaluateArgs& args);

struct AttnReportArgs {
  std::vector<std::string> checkpoint_paths;  // averaged when several
  std::string data_path;                      // ERE JSONL
  std::string out_prefix;                     // writes <prefix>.csv and <prefix>.json
};
void cmd_attn_report(const AttnReportArgs& args);

struct HeatmapArgs {
  std::string data_path;
  std::optional<std::string> labels_path;
  std::string predictions_a;
  std::string predictions_b;
  std::string out_path;
  long min_samples = 50;
};
void cmd_heatmap(const HeatmapArgs& args);

struct McNemarArgs {
  std::string data_path;
  std::optional<std::string> labels_path;
  std::string task = "ere";
  std::string predictions_a;
  std::string predictions_b;
};
// Prints b, c, the statistic and the p-value; returns the p-value.
double cmd_mcnemar(const McNemarArgs& args);

struct GenSynthArgs {
  std::string what;  // corpus | ere | extractive_qa | binary_qa
  int count = 100;
  uint64_t seed = 5;
  std::string out_dir;
  double train_split = 0.0;  // >0: also write train/dev/test splits
};
void cmd_gen_synth(const GenSynthArgs& args);

// Prediction dumps: JSONL of {"example_id", "prediction"}.
std::vector<int> read_ere_prediction_dump(const std::string& path, std::span<const EREExample> examples);

}  // namespace econet

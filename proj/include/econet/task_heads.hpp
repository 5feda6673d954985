#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "econet/adam.hpp"
#include "econet/checkpoint.hpp"
#include "econet/metrics.hpp"
#include "econet/minilm.hpp"
#include "econet/objectives.hpp"
#include "econet/task_types.hpp"
#include "econet/vocab.hpp"

namespace econet {

enum class TaskKind { ere, extractive_qa, binary_qa };
TaskKind task_kind_from_string(const std::string& s);
std::string to_string(TaskKind kind);

// Two-layer perceptron head used by all three task shapes.
struct TaskMlp {
  MatrixXd w1;  // in x hidden
  VectorXd b1;
  MatrixXd w2;  // hidden x out
  VectorXd b2;
  static TaskMlp zeros(int in, int hidden, int out);
  static TaskMlp init(int in, int hidden, int out, uint64_t seed);
};

template <typename Params, typename Fn>
  requires std::same_as<std::remove_const_t<Params>, TaskMlp>
void visit_tensors(Params& p, Fn&& fn) {
  fn("mlp.w1", p.w1);
  fn("mlp.b1", p.b1);
  fn("mlp.w2", p.w2);
  fn("mlp.b2", p.b2);
}

// Encoder plus task head; the pre-training heads are dropped at
// fine-tune time and only the encoder transfers.
struct FinetuneModel {
  MiniLmParameters encoder;
  TaskMlp head;
  static FinetuneModel zeros(const ModelConfig& config, int in, int hidden, int out);
};

template <typename Params, typename Fn>
  requires std::same_as<std::remove_const_t<Params>, FinetuneModel>
void visit_tensors(Params& p, Fn&& fn) {
  visit_tensors(p.encoder, fn);
  visit_tensors(p.head, fn);
}

// Relation distribution from the concatenated trigger representations
// [v_i ; v_j]; asymmetric in (i, j) by construction.
VectorXd ere_forward(const FinetuneModel& model, const Vocabulary& vocab, const EREExample& ex,
                     ForwardTrace* trace_out = nullptr);

// Per-passage-token answer probabilities for [P, <sep>, Q].
VectorXd extractive_qa_forward(const FinetuneModel& model, const Vocabulary& vocab,
                               const ExtractiveQAExample& ex);

// Probability that the candidate answer is a true statement, read at
// the reserved classifier token of [<cls>, P, <sep>, Q, <sep>, A].
double binary_qa_forward(const FinetuneModel& model, const Vocabulary& vocab, const BinaryQAExample& ex);

struct TaskData {
  TaskKind kind = TaskKind::ere;
  LabelSet labels;  // ERE only
  std::vector<EREExample> ere;
  std::vector<ExtractiveQAExample> extractive;
  std::vector<BinaryQAExample> binary;
  size_t size() const;
};

// Word vocabulary covering a task's tokens plus the lexicon atoms, for
// runs that do not start from a pre-trained checkpoint.
Vocabulary vocabulary_from_task(const TaskData& data, const TemporalLexicon& lexicon);

// JSONL readers/writers for the three task shapes.
void write_task_jsonl(const TaskData& data, const std::string& path);
TaskData read_task_jsonl(TaskKind kind, const std::string& path, const LabelSet& labels = {});
void write_label_set(const LabelSet& labels, const std::string& path);
LabelSet read_label_set(const std::string& path);

struct FinetuneConfig {
  double lr = 1e-3;
  int batch_size = 4;
  int epochs = 10;
  std::vector<uint64_t> seeds = {5, 7, 23};
  double train_fraction = 1.0;
  int mlp_hidden = 64;
};

struct EvalResult {
  std::map<std::string, double> metrics;
  // Per-example prediction (JSON value) keyed in input order.
  std::vector<std::pair<std::string, nlohmann::ordered_json>> predictions;
  std::vector<int> correctness;  // per example, for significance tests
};

EvalResult evaluate_task(const FinetuneModel& model, const Vocabulary& vocab, const TaskData& data);

struct SeedRunResult {
  uint64_t seed = 0;
  FinetuneModel model;
  double best_dev_metric = 0.0;
  int best_epoch = -1;  // -1 when epochs == 0
  std::vector<double> dev_metric_per_epoch;
};

// Fine-tunes encoder + fresh head for one seed with per-epoch dev
// selection. train_fraction subsamples the training set reproducibly
// per seed before training.
SeedRunResult finetune_one_seed(const MiniLmParameters& encoder_init, const Vocabulary& vocab,
                                const TaskData& train, const TaskData& dev, const FinetuneConfig& config,
                                uint64_t seed);

// The dev metric a task selects on: micro-F1 for ERE, macro question F1
// for the QA shapes.
double primary_metric(const EvalResult& eval, TaskKind kind);
std::string primary_metric_name(TaskKind kind);

// Fine-tune checkpoint container.
struct FinetuneCheckpoint {
  ModelConfig config;
  FinetuneModel model;
  Vocabulary vocab;
  TemporalLexicon lexicon;
  TaskKind task = TaskKind::ere;
  LabelSet labels;
  int mlp_hidden = 64;
  nlohmann::ordered_json extra;
};
void save_finetune_checkpoint(const std::string& path, const FinetuneCheckpoint& ckpt);
FinetuneCheckpoint load_finetune_checkpoint(const std::string& path);

}  // namespace econet

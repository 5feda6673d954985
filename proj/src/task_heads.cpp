#include "econet/task_heads.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

namespace econet {

TaskKind task_kind_from_string(const std::string& s) {
  if (s == "ere") return TaskKind::ere;
  if (s == "extractive_qa") return TaskKind::extractive_qa;
  if (s == "binary_qa") return TaskKind::binary_qa;
  throw std::invalid_argument("unknown task: " + s);
}

std::string to_string(TaskKind kind) {
  switch (kind) {
    case TaskKind::ere: return "ere";
    case TaskKind::extractive_qa: return "extractive_qa";
    case TaskKind::binary_qa: return "binary_qa";
  }
  return "ere";
}

int LabelSet::id_of(const std::string& name) const {
  for (int i = 0; i < (int)names.size(); ++i)
    if (names[i] == name) return i;
  throw std::out_of_range("unknown label: " + name);
}

TaskMlp TaskMlp::zeros(int in, int hidden, int out) {
  TaskMlp m;
  m.w1 = MatrixXd::Zero(in, hidden);
  m.b1 = VectorXd::Zero(hidden);
  m.w2 = MatrixXd::Zero(hidden, out);
  m.b2 = VectorXd::Zero(out);
  return m;
}

TaskMlp TaskMlp::init(int in, int hidden, int out, uint64_t seed) {
  TaskMlp m = zeros(in, hidden, out);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 0.02);
  for (Eigen::Index i = 0; i < m.w1.size(); ++i) m.w1.data()[i] = normal(rng);
  for (Eigen::Index i = 0; i < m.w2.size(); ++i) m.w2.data()[i] = normal(rng);
  return m;
}

FinetuneModel FinetuneModel::zeros(const ModelConfig& config, int in, int hidden, int out) {
  FinetuneModel m;
  m.encoder = MiniLmParameters::zeros(config);
  m.head = TaskMlp::zeros(in, hidden, out);
  return m;
}

namespace {

struct MlpPass {
  VectorXd x, u, a, logits;
};

MlpPass mlp_forward(const TaskMlp& mlp, const VectorXd& x) {
  MlpPass pass;
  pass.x = x;
  pass.u = mlp.w1.transpose() * x + mlp.b1;
  pass.a = pass.u.unaryExpr([](double v) { return gelu(v); });
  pass.logits = mlp.w2.transpose() * pass.a + mlp.b2;
  return pass;
}

VectorXd mlp_backward(const TaskMlp& mlp, const MlpPass& pass, const VectorXd& d_logits, TaskMlp& grads) {
  grads.w2.noalias() += pass.a * d_logits.transpose();
  grads.b2.noalias() += d_logits;
  VectorXd d_a = mlp.w2 * d_logits;
  VectorXd d_u = d_a.array() * pass.u.unaryExpr([](double v) { return gelu_derivative(v); }).array();
  grads.w1.noalias() += pass.x * d_u.transpose();
  grads.b1.noalias() += d_u;
  return mlp.w1 * d_u;
}

std::vector<int> encode_ere(const Vocabulary& vocab, const EREExample& ex) {
  if (ex.i == ex.j) throw std::invalid_argument("ERE example with i == j: " + ex.example_id);
  if (ex.i < 0 || ex.j < 0 || ex.i >= (int)ex.passage.size() || ex.j >= (int)ex.passage.size())
    throw std::out_of_range("ERE trigger position out of range: " + ex.example_id);
  return vocab.encode(ex.passage);
}

std::vector<int> encode_extractive(const Vocabulary& vocab, const ExtractiveQAExample& ex) {
  if (ex.answer_labels.size() != ex.passage.size())
    throw std::invalid_argument("answer label vector length mismatch: " + ex.example_id);
  std::vector<int> ids = vocab.encode(ex.passage);
  ids.push_back(Vocabulary::kSep);
  auto q = vocab.encode(ex.question);
  ids.insert(ids.end(), q.begin(), q.end());
  return ids;
}

std::vector<int> encode_binary(const Vocabulary& vocab, const BinaryQAExample& ex) {
  std::vector<int> ids = {Vocabulary::kCls};
  auto p = vocab.encode(ex.passage);
  ids.insert(ids.end(), p.begin(), p.end());
  ids.push_back(Vocabulary::kSep);
  auto q = vocab.encode(ex.question);
  ids.insert(ids.end(), q.begin(), q.end());
  ids.push_back(Vocabulary::kSep);
  auto a = vocab.encode(ex.answer);
  ids.insert(ids.end(), a.begin(), a.end());
  return ids;
}

VectorXd softmax_vec(const VectorXd& logits) {
  const double mx = logits.maxCoeff();
  VectorXd ex = (logits.array() - mx).exp();
  return ex / ex.sum();
}

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

double bce(double z, int y) { return std::max(z, 0.0) - z * double(y) + std::log1p(std::exp(-std::abs(z))); }

}  // namespace

VectorXd ere_forward(const FinetuneModel& model, const Vocabulary& vocab, const EREExample& ex,
                     ForwardTrace* trace_out) {
  auto ids = encode_ere(vocab, ex);
  auto trace = forward(model.encoder, ids, false, 0);
  VectorXd h(2 * model.encoder.config.hidden_dim);
  h << trace.final_hidden().row(ex.i).transpose(), trace.final_hidden().row(ex.j).transpose();
  auto pass = mlp_forward(model.head, h);
  if (trace_out) *trace_out = std::move(trace);
  return softmax_vec(pass.logits);
}

VectorXd extractive_qa_forward(const FinetuneModel& model, const Vocabulary& vocab,
                               const ExtractiveQAExample& ex) {
  auto ids = encode_extractive(vocab, ex);
  auto trace = forward(model.encoder, ids, false, 0);
  VectorXd probs(ex.passage.size());
  for (int t = 0; t < (int)ex.passage.size(); ++t) {
    auto pass = mlp_forward(model.head, trace.final_hidden().row(t).transpose());
    probs(t) = sigmoid(pass.logits(0));
  }
  return probs;
}

double binary_qa_forward(const FinetuneModel& model, const Vocabulary& vocab, const BinaryQAExample& ex) {
  auto ids = encode_binary(vocab, ex);
  auto trace = forward(model.encoder, ids, false, 0);
  auto pass = mlp_forward(model.head, trace.final_hidden().row(0).transpose());
  return sigmoid(pass.logits(0));
}

Vocabulary vocabulary_from_task(const TaskData& data, const TemporalLexicon& lexicon) {
  std::vector<MaskedSample> none;
  Vocabulary vocab = Vocabulary::build(none, lexicon, {});
  auto add_all = [&](const std::vector<std::string>& tokens) {
    for (const auto& t : tokens) vocab.add(t);
  };
  for (const auto& ex : data.ere) add_all(ex.passage);
  for (const auto& ex : data.extractive) {
    add_all(ex.passage);
    add_all(ex.question);
  }
  for (const auto& ex : data.binary) {
    add_all(ex.passage);
    add_all(ex.question);
    add_all(ex.answer);
  }
  return vocab;
}

size_t TaskData::size() const {
  switch (kind) {
    case TaskKind::ere: return ere.size();
    case TaskKind::extractive_qa: return extractive.size();
    case TaskKind::binary_qa: return binary.size();
  }
  return 0;
}

void write_label_set(const LabelSet& labels, const std::string& path) {
  nlohmann::ordered_json j;
  j["names"] = labels.names;
  std::vector<std::string> neg;
  for (int id : labels.negative) neg.push_back(labels.names.at(id));
  j["negative"] = neg;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write label set: " + path);
  out << j.dump(2) << '\n';
}

LabelSet read_label_set(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open label set: " + path);
  nlohmann::json j = nlohmann::json::parse(in);
  LabelSet labels;
  labels.names = j.at("names").get<std::vector<std::string>>();
  for (const auto& name : j.value("negative", std::vector<std::string>{}))
    labels.negative.insert(labels.id_of(name));
  return labels;
}

void write_task_jsonl(const TaskData& data, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write task data: " + path);
  switch (data.kind) {
    case TaskKind::ere:
      for (const auto& ex : data.ere) {
        nlohmann::ordered_json j;
        j["example_id"] = ex.example_id;
        j["tokens"] = ex.passage;
        j["i"] = ex.i;
        j["j"] = ex.j;
        j["relation"] = ex.relation;
        out << j.dump() << '\n';
      }
      break;
    case TaskKind::extractive_qa:
      for (const auto& ex : data.extractive) {
        nlohmann::ordered_json j;
        j["example_id"] = ex.example_id;
        j["group_id"] = ex.group_id;
        j["passage"] = ex.passage;
        j["question"] = ex.question;
        j["answers"] = ex.answer_labels;
        out << j.dump() << '\n';
      }
      break;
    case TaskKind::binary_qa:
      for (const auto& ex : data.binary) {
        nlohmann::ordered_json j;
        j["example_id"] = ex.example_id;
        j["group_id"] = ex.group_id;
        j["passage"] = ex.passage;
        j["question"] = ex.question;
        j["answer"] = ex.answer;
        j["label"] = ex.label;
        out << j.dump() << '\n';
      }
      break;
  }
}

TaskData read_task_jsonl(TaskKind kind, const std::string& path, const LabelSet& labels) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open task data: " + path);
  TaskData data;
  data.kind = kind;
  data.labels = labels;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      nlohmann::json j = nlohmann::json::parse(line);
      switch (kind) {
        case TaskKind::ere: {
          EREExample ex;
          ex.example_id = j.at("example_id").get<std::string>();
          ex.passage = j.at("tokens").get<std::vector<std::string>>();
          ex.i = j.at("i").get<int>();
          ex.j = j.at("j").get<int>();
          ex.relation = j.at("relation").get<int>();
          if (labels.size() > 0 && (ex.relation < 0 || ex.relation >= labels.size()))
            throw std::runtime_error("relation id outside the label set");
          data.ere.push_back(std::move(ex));
          break;
        }
        case TaskKind::extractive_qa: {
          ExtractiveQAExample ex;
          ex.example_id = j.at("example_id").get<std::string>();
          ex.group_id = j.value("group_id", ex.example_id);
          ex.passage = j.at("passage").get<std::vector<std::string>>();
          ex.question = j.at("question").get<std::vector<std::string>>();
          ex.answer_labels = j.at("answers").get<std::vector<int>>();
          data.extractive.push_back(std::move(ex));
          break;
        }
        case TaskKind::binary_qa: {
          BinaryQAExample ex;
          ex.example_id = j.at("example_id").get<std::string>();
          ex.group_id = j.value("group_id", ex.example_id);
          ex.passage = j.at("passage").get<std::vector<std::string>>();
          ex.question = j.at("question").get<std::vector<std::string>>();
          ex.answer = j.at("answer").get<std::vector<std::string>>();
          ex.label = j.at("label").get<int>();
          data.binary.push_back(std::move(ex));
          break;
        }
      }
    } catch (const std::exception& e) {
      throw std::runtime_error("malformed task record at line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return data;
}

namespace {

// One training example's loss and gradients; shared by all tasks.
double train_example(const FinetuneModel& model, const Vocabulary& vocab, const TaskData& data, size_t index,
                     double weight, FinetuneModel& grads) {
  const ModelConfig& cfg = model.encoder.config;
  switch (data.kind) {
    case TaskKind::ere: {
      const EREExample& ex = data.ere[index];
      auto ids = encode_ere(vocab, ex);
      ForwardCache cache;
      auto trace = forward(model.encoder, ids, false, 0, &cache);
      VectorXd h(2 * cfg.hidden_dim);
      h << trace.final_hidden().row(ex.i).transpose(), trace.final_hidden().row(ex.j).transpose();
      auto pass = mlp_forward(model.head, h);
      VectorXd probs = softmax_vec(pass.logits);
      double loss = -std::log(std::max(probs(ex.relation), 1e-300));
      VectorXd d_logits = probs;
      d_logits(ex.relation) -= 1.0;
      d_logits *= weight;
      VectorXd d_h = mlp_backward(model.head, pass, d_logits, grads.head);
      MatrixXd d_final = MatrixXd::Zero(trace.final_hidden().rows(), cfg.hidden_dim);
      d_final.row(ex.i) += d_h.head(cfg.hidden_dim).transpose();
      d_final.row(ex.j) += d_h.tail(cfg.hidden_dim).transpose();
      backward(model.encoder, cache, d_final, grads.encoder);
      return loss;
    }
    case TaskKind::extractive_qa: {
      const ExtractiveQAExample& ex = data.extractive[index];
      auto ids = encode_extractive(vocab, ex);
      ForwardCache cache;
      auto trace = forward(model.encoder, ids, false, 0, &cache);
      MatrixXd d_final = MatrixXd::Zero(trace.final_hidden().rows(), cfg.hidden_dim);
      double loss = 0.0;
      const double token_weight = weight / double(ex.passage.size());
      for (int t = 0; t < (int)ex.passage.size(); ++t) {
        auto pass = mlp_forward(model.head, trace.final_hidden().row(t).transpose());
        const double z = pass.logits(0);
        const int y = ex.answer_labels[t];
        loss += bce(z, y) / double(ex.passage.size());
        VectorXd d_logits(1);
        d_logits(0) = (sigmoid(z) - double(y)) * token_weight;
        VectorXd d_h = mlp_backward(model.head, pass, d_logits, grads.head);
        d_final.row(t) += d_h.transpose();
      }
      backward(model.encoder, cache, d_final, grads.encoder);
      return loss;
    }
    case TaskKind::binary_qa: {
      const BinaryQAExample& ex = data.binary[index];
      auto ids = encode_binary(vocab, ex);
      ForwardCache cache;
      auto trace = forward(model.encoder, ids, false, 0, &cache);
      auto pass = mlp_forward(model.head, trace.final_hidden().row(0).transpose());
      const double z = pass.logits(0);
      double loss = bce(z, ex.label);
      VectorXd d_logits(1);
      d_logits(0) = (sigmoid(z) - double(ex.label)) * weight;
      VectorXd d_h = mlp_backward(model.head, pass, d_logits, grads.head);
      MatrixXd d_final = MatrixXd::Zero(trace.final_hidden().rows(), cfg.hidden_dim);
      d_final.row(0) = d_h.transpose();
      backward(model.encoder, cache, d_final, grads.encoder);
      return loss;
    }
  }
  return 0.0;
}

}  // namespace

double primary_metric(const EvalResult& eval, TaskKind kind) {
  switch (kind) {
    case TaskKind::ere: return eval.metrics.at("micro_f1");
    case TaskKind::extractive_qa:
    case TaskKind::binary_qa: return eval.metrics.at("macro_f1");
  }
  return 0.0;
}

std::string primary_metric_name(TaskKind kind) {
  return kind == TaskKind::ere ? "micro_f1" : "macro_f1";
}

EvalResult evaluate_task(const FinetuneModel& model, const Vocabulary& vocab, const TaskData& data) {
  EvalResult result;
  switch (data.kind) {
    case TaskKind::ere: {
      std::vector<int> gold, pred;
      for (const auto& ex : data.ere) {
        VectorXd probs = ere_forward(model, vocab, ex);
        int argmax = 0;
        probs.maxCoeff(&argmax);
        gold.push_back(ex.relation);
        pred.push_back(argmax);
        result.predictions.emplace_back(ex.example_id, argmax);
        result.correctness.push_back(argmax == ex.relation ? 1 : 0);
      }
      const int n_labels = data.labels.size() > 0
                               ? data.labels.size()
                               : 1 + std::max(*std::max_element(gold.begin(), gold.end()),
                                              *std::max_element(pred.begin(), pred.end()));
      result.metrics["micro_f1"] = micro_f1_from_pairs(gold, pred, n_labels, data.labels.negative);
      long correct = 0;
      for (int c : result.correctness) correct += c;
      result.metrics["accuracy"] = data.ere.empty() ? 0.0 : double(correct) / double(data.ere.size());
      break;
    }
    case TaskKind::extractive_qa: {
      std::vector<std::set<int>> pred_sets, gold_sets;
      std::vector<std::string> group_order;
      std::map<std::string, std::vector<int>> group_ems;
      for (const auto& ex : data.extractive) {
        VectorXd probs = extractive_qa_forward(model, vocab, ex);
        std::set<int> pred, gold;
        for (int t = 0; t < (int)ex.passage.size(); ++t) {
          if (probs(t) > 0.5) pred.insert(t);
          if (ex.answer_labels[t] == 1) gold.insert(t);
        }
        const int em = exact_match(pred, gold);
        pred_sets.push_back(pred);
        gold_sets.push_back(gold);
        if (!group_ems.count(ex.group_id)) group_order.push_back(ex.group_id);
        group_ems[ex.group_id].push_back(em);
        nlohmann::ordered_json p = nlohmann::ordered_json::array();
        for (int t : pred) p.push_back(t);
        result.predictions.emplace_back(ex.example_id, std::move(p));
        result.correctness.push_back(em);
      }
      result.metrics["macro_f1"] = macro_f1_questions(pred_sets, gold_sets);
      double em_sum = 0.0;
      for (int em : result.correctness) em_sum += em;
      result.metrics["em"] = result.correctness.empty() ? 0.0 : em_sum / double(result.correctness.size());
      std::vector<std::vector<int>> groups;
      for (const auto& g : group_order) groups.push_back(group_ems.at(g));
      result.metrics["consistency"] = consistency(groups);
      break;
    }
    case TaskKind::binary_qa: {
      std::vector<std::string> group_order;
      std::map<std::string, std::pair<std::set<int>, std::set<int>>> group_sets;  // pred, gold
      std::map<std::string, int> group_counts;
      for (const auto& ex : data.binary) {
        const double prob = binary_qa_forward(model, vocab, ex);
        const int pred = prob > 0.5 ? 1 : 0;
        if (!group_sets.count(ex.group_id)) group_order.push_back(ex.group_id);
        auto& [pred_set, gold_set] = group_sets[ex.group_id];
        const int candidate = group_counts[ex.group_id]++;
        if (pred == 1) pred_set.insert(candidate);
        if (ex.label == 1) gold_set.insert(candidate);
        result.predictions.emplace_back(ex.example_id, pred);
        result.correctness.push_back(pred == ex.label ? 1 : 0);
      }
      std::vector<std::set<int>> pred_sets, gold_sets;
      for (const auto& g : group_order) {
        pred_sets.push_back(group_sets.at(g).first);
        gold_sets.push_back(group_sets.at(g).second);
      }
      result.metrics["macro_f1"] = macro_f1_questions(pred_sets, gold_sets);
      double em_sum = 0.0;
      for (size_t g = 0; g < pred_sets.size(); ++g) em_sum += exact_match(pred_sets[g], gold_sets[g]);
      result.metrics["em"] = pred_sets.empty() ? 0.0 : em_sum / double(pred_sets.size());
      long correct = 0;
      for (int c : result.correctness) correct += c;
      result.metrics["accuracy"] =
          result.correctness.empty() ? 0.0 : double(correct) / double(result.correctness.size());
      break;
    }
  }
  return result;
}

namespace {

TaskData subsample(const TaskData& data, double fraction, uint64_t seed) {
  if (fraction >= 1.0) return data;
  if (fraction <= 0.0) throw std::invalid_argument("train_fraction must be positive");
  const size_t n = data.size();
  const size_t keep = std::max<size_t>(1, (size_t)std::llround(fraction * double(n)));
  std::vector<size_t> order(n);
  for (size_t i = 0; i < n; ++i) order[i] = i;
  std::mt19937_64 rng(seed ^ 0xfeedface);
  std::shuffle(order.begin(), order.end(), rng);
  order.resize(keep);
  std::sort(order.begin(), order.end());
  TaskData out;
  out.kind = data.kind;
  out.labels = data.labels;
  for (size_t idx : order) {
    switch (data.kind) {
      case TaskKind::ere: out.ere.push_back(data.ere[idx]); break;
      case TaskKind::extractive_qa: out.extractive.push_back(data.extractive[idx]); break;
      case TaskKind::binary_qa: out.binary.push_back(data.binary[idx]); break;
    }
  }
  return out;
}

}  // namespace

SeedRunResult finetune_one_seed(const MiniLmParameters& encoder_init, const Vocabulary& vocab,
                                const TaskData& train_full, const TaskData& dev, const FinetuneConfig& config,
                                uint64_t seed) {
  const ModelConfig& cfg = encoder_init.config;
  const int in_dim = train_full.kind == TaskKind::ere ? 2 * cfg.hidden_dim : cfg.hidden_dim;
  const int out_dim = train_full.kind == TaskKind::ere ? std::max(1, train_full.labels.size()) : 1;

  SeedRunResult result;
  result.seed = seed;
  result.model.encoder = encoder_init;
  result.model.head = TaskMlp::init(in_dim, config.mlp_hidden, out_dim, seed);

  TaskData train = subsample(train_full, config.train_fraction, seed);
  if (train.size() == 0) throw std::invalid_argument("finetune: empty training set");

  if (config.epochs == 0) {
    auto eval = evaluate_task(result.model, vocab, dev);
    result.best_dev_metric = primary_metric(eval, dev.kind);
    return result;
  }

  auto opt = AdamState<FinetuneModel>::zeros_like(cfg, in_dim, config.mlp_hidden, out_dim);
  std::mt19937_64 rng(seed);
  FinetuneModel working = result.model;
  double best = -1.0;

  std::vector<size_t> order(train.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (size_t start = 0; start < order.size(); start += config.batch_size) {
      const size_t end = std::min(order.size(), start + config.batch_size);
      FinetuneModel grads = FinetuneModel::zeros(cfg, in_dim, config.mlp_hidden, out_dim);
      const double weight = 1.0 / double(end - start);
      for (size_t k = start; k < end; ++k)
        (void)train_example(working, vocab, train, order[k], weight, grads);
      adam_step(working, grads, opt, config.lr);
    }
    auto eval = evaluate_task(working, vocab, dev);
    const double metric = primary_metric(eval, dev.kind);
    result.dev_metric_per_epoch.push_back(metric);
    if (metric > best) {
      best = metric;
      result.model = working;
      result.best_epoch = epoch;
    }
  }
  result.best_dev_metric = best;
  return result;
}

void save_finetune_checkpoint(const std::string& path, const FinetuneCheckpoint& ckpt) {
  nlohmann::ordered_json meta;
  meta["format"] = "econet-checkpoint";
  meta["kind"] = "finetune";
  meta["task"] = to_string(ckpt.task);
  meta["config"] = model_config_to_json(ckpt.config);
  meta["mlp_hidden"] = ckpt.mlp_hidden;
  meta["labels"] = ckpt.labels.names;
  std::vector<std::string> neg;
  for (int id : ckpt.labels.negative) neg.push_back(ckpt.labels.names.at(id));
  meta["negative_labels"] = neg;
  meta["vocab"] = ckpt.vocab.all_tokens();
  meta["lexicon"] = lexicon_to_json(ckpt.lexicon);
  if (!ckpt.extra.is_null()) meta["run"] = ckpt.extra;
  std::vector<ConstTensorView> blocks;
  visit_tensors(ckpt.model, [&](const std::string& name, const auto& t) {
    blocks.push_back({"model/" + name, t.data(), t.size()});
  });
  write_raw_checkpoint(path, std::move(meta), blocks);
}

FinetuneCheckpoint load_finetune_checkpoint(const std::string& path) {
  RawCheckpoint raw = read_raw_checkpoint(path);
  if (raw.meta.value("kind", "") != "finetune")
    throw std::runtime_error("not a finetune checkpoint: " + path);
  FinetuneCheckpoint ckpt;
  ckpt.config = model_config_from_json(raw.meta.at("config"));
  ckpt.task = task_kind_from_string(raw.meta.at("task").get<std::string>());
  ckpt.mlp_hidden = raw.meta.at("mlp_hidden").get<int>();
  ckpt.labels.names = raw.meta.at("labels").get<std::vector<std::string>>();
  for (const auto& name : raw.meta.at("negative_labels").get<std::vector<std::string>>())
    ckpt.labels.negative.insert(ckpt.labels.id_of(name));
  ckpt.vocab = vocabulary_from_tokens(raw.meta.at("vocab").get<std::vector<std::string>>());
  ckpt.lexicon = lexicon_from_json(raw.meta.at("lexicon"));
  if (raw.meta.contains("run")) ckpt.extra = raw.meta.at("run");
  const int in_dim =
      ckpt.task == TaskKind::ere ? 2 * ckpt.config.hidden_dim : ckpt.config.hidden_dim;
  const int out_dim = ckpt.task == TaskKind::ere ? std::max(1, ckpt.labels.size()) : 1;
  ckpt.model = FinetuneModel::zeros(ckpt.config, in_dim, ckpt.mlp_hidden, out_dim);
  auto views = tensor_views(ckpt.model);
  if (views.size() != raw.blocks.size()) throw std::runtime_error("finetune checkpoint block mismatch");
  for (size_t i = 0; i < views.size(); ++i) {
    const auto& [name, data] = raw.blocks[i];
    if ((Eigen::Index)data.size() != views[i].size)
      throw std::runtime_error("finetune checkpoint block size mismatch at " + name);
    std::memcpy(views[i].data, data.data(), data.size() * sizeof(double));
  }
  return ckpt;
}

}  // namespace econet

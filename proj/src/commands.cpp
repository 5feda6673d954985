#include "econet/commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>

#include "econet/attention.hpp"
#include "econet/mask_builder.hpp"
#include "econet/synth.hpp"
#include "econet/text.hpp"

namespace econet {

namespace fs = std::filesystem;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path);
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create directory " + dir + ": " + ec.message());
}

// Encoder, vocabulary and lexicon from either checkpoint kind.
struct EncoderBundle {
  MiniLmParameters encoder;
  Vocabulary vocab;
  TemporalLexicon lexicon;
};

EncoderBundle load_encoder_bundle(const std::string& path) {
  RawCheckpoint raw = read_raw_checkpoint(path);
  const std::string kind = raw.meta.value("kind", "");
  EncoderBundle bundle;
  if (kind == "pretrain") {
    auto ckpt = load_pretrain_checkpoint(path);
    bundle.encoder = std::move(ckpt.model.encoder);
    bundle.vocab = std::move(ckpt.vocab);
    bundle.lexicon = std::move(ckpt.lexicon);
  } else if (kind == "finetune") {
    auto ckpt = load_finetune_checkpoint(path);
    bundle.encoder = std::move(ckpt.model.encoder);
    bundle.vocab = std::move(ckpt.vocab);
    bundle.lexicon = std::move(ckpt.lexicon);
  } else {
    throw std::runtime_error("unrecognized checkpoint kind in " + path);
  }
  return bundle;
}

std::map<std::string, nlohmann::json> read_prediction_map(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open prediction dump: " + path);
  std::map<std::string, nlohmann::json> preds;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      auto j = nlohmann::json::parse(line);
      preds[j.at("example_id").get<std::string>()] = j.at("prediction");
    } catch (const std::exception& e) {
      throw std::runtime_error("malformed prediction record at line " + std::to_string(line_no) + " of " +
                               path + ": " + e.what());
    }
  }
  return preds;
}

LabelSet labels_for_data(const std::optional<std::string>& labels_path,
                         std::span<const EREExample> examples) {
  if (labels_path) return read_label_set(*labels_path);
  int max_label = 0;
  for (const auto& ex : examples) max_label = std::max(max_label, ex.relation);
  LabelSet labels;
  for (int r = 0; r <= max_label; ++r) labels.names.push_back("LABEL_" + std::to_string(r));
  return labels;
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / double(v.size());
}

double stddev_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / double(v.size()));
}

}  // namespace

void cmd_build_corpus(const BuildCorpusArgs& args) {
  TemporalLexicon lexicon =
      args.lexicon_path ? TemporalLexicon::load_file(*args.lexicon_path) : TemporalLexicon::load_default();
  EventTagger tagger = EventTagger::with_lexicon(lexicon);
  if (args.event_lexicon_path) tagger.extend_verbs_from_file(*args.event_lexicon_path);

  std::vector<fs::path> files;
  if (!fs::is_directory(args.input_dir)) throw std::runtime_error("not a directory: " + args.input_dir);
  for (const auto& entry : fs::directory_iterator(args.input_dir))
    if (entry.is_regular_file() && entry.path().extension() == ".txt") files.push_back(entry.path());
  std::sort(files.begin(), files.end());

  std::vector<std::string> documents;
  for (const auto& file : files) {
    auto docs = split_documents(read_file(file.string()));
    documents.insert(documents.end(), docs.begin(), docs.end());
  }

  CorpusBuildOptions options;
  options.budget = args.budget;
  if (args.exclusion_path) options.excluded_passage_hashes = load_exclusion_list(*args.exclusion_path);

  auto result = build_corpus(documents, lexicon, tagger, options);
  write_samples_jsonl(result.samples, args.out_path);
  write_file(args.out_path + ".stats.json", result.stats.to_json() + "\n");
  std::cout << "wrote " << result.samples.size() << " samples (" << result.stats.temporal_samples
            << " temporal, " << result.stats.event_samples << " event) from " << result.stats.documents
            << " documents to " << args.out_path << "\n";
}

std::string cmd_pretrain(const PretrainArgs& args) {
  args.config.validate();
  ensure_dir(args.out_dir);
  auto samples = read_samples_jsonl(args.corpus_path);

  std::unique_ptr<Trainer> trainer;
  if (args.resume_checkpoint) {
    auto ckpt = load_pretrain_checkpoint(*args.resume_checkpoint);
    trainer = std::make_unique<Trainer>(ckpt, args.config.pretrain_run_config(), std::move(samples));
  } else {
    trainer = std::make_unique<Trainer>(args.config.pretrain_run_config(), std::move(samples));
  }
  if (trainer->skipped_overlength() > 0)
    std::cout << "skipped " << trainer->skipped_overlength() << " over-length samples\n";

  write_file(args.out_dir + "/resolved_config.cfg", args.config.to_text());

  const std::string log_path = args.out_dir + "/loss_log.csv";
  std::ofstream log(log_path, args.resume_checkpoint ? std::ios::app : std::ios::trunc);
  if (!log) throw std::runtime_error("cannot open loss log: " + log_path);
  if (!args.resume_checkpoint) log << loss_log_header() << "\n";

  const long interval = args.config.pretrain.checkpoint_interval;
  while (trainer->current_step() < args.config.pretrain.max_steps) {
    auto row = trainer->step();
    log << loss_log_csv(row) << "\n";
    if (interval > 0 && row.step % interval == 0 && row.step < args.config.pretrain.max_steps) {
      save_pretrain_checkpoint(args.out_dir + "/checkpoint_step" + std::to_string(row.step) + ".bin",
                               trainer->make_checkpoint(true));
    }
  }
  log.flush();
  const std::string final_path = args.out_dir + "/checkpoint_final.bin";
  save_pretrain_checkpoint(final_path, trainer->make_checkpoint(true));
  std::cout << "pretrained to step " << trainer->current_step() << "; final checkpoint " << final_path
            << "\n";
  return final_path;
}

std::string cmd_finetune(const FinetuneArgs& args) {
  args.config.validate();
  ensure_dir(args.out_dir);
  const TaskKind task = task_kind_from_string(args.config.finetune.task);

  LabelSet labels;
  if (task == TaskKind::ere) labels = read_label_set(args.data_dir + "/labels.json");
  TaskData train = read_task_jsonl(task, args.data_dir + "/train.jsonl", labels);
  TaskData dev = read_task_jsonl(task, args.data_dir + "/dev.jsonl", labels);

  MiniLmParameters encoder_init;
  Vocabulary vocab;
  TemporalLexicon lexicon = TemporalLexicon::load_default();
  bool random_init = args.checkpoint_path.empty();
  if (!random_init) {
    auto bundle = load_encoder_bundle(args.checkpoint_path);
    encoder_init = std::move(bundle.encoder);
    vocab = std::move(bundle.vocab);
    lexicon = std::move(bundle.lexicon);
  } else {
    TaskData merged = train;
    merged.extractive.insert(merged.extractive.end(), dev.extractive.begin(), dev.extractive.end());
    merged.binary.insert(merged.binary.end(), dev.binary.begin(), dev.binary.end());
    merged.ere.insert(merged.ere.end(), dev.ere.begin(), dev.ere.end());
    vocab = vocabulary_from_task(merged, lexicon);
    ModelConfig cfg = args.config.model;
    cfg.vocab_size = vocab.size();
    encoder_init = MiniLmParameters::init(cfg, args.config.pretrain.seed);
  }

  write_file(args.out_dir + "/resolved_config.cfg", args.config.to_text());

  FinetuneConfig fc = args.config.finetune_config();
  std::vector<double> per_seed_metric;
  std::optional<SeedRunResult> best;
  for (uint64_t seed : fc.seeds) {
    MiniLmParameters init = encoder_init;
    if (random_init) {
      ModelConfig cfg = encoder_init.config;
      init = MiniLmParameters::init(cfg, seed);
    }
    auto run = finetune_one_seed(init, vocab, train, dev, fc, seed);
    per_seed_metric.push_back(run.best_dev_metric);
    std::ofstream dev_log(args.out_dir + "/dev_log_seed" + std::to_string(seed) + ".csv");
    dev_log << "epoch," << primary_metric_name(task) << "\n";
    for (size_t e = 0; e < run.dev_metric_per_epoch.size(); ++e)
      dev_log << e << "," << run.dev_metric_per_epoch[e] << "\n";
    if (!best || run.best_dev_metric > best->best_dev_metric) best = std::move(run);
  }

  nlohmann::ordered_json summary;
  summary["task"] = to_string(task);
  summary["metric"] = primary_metric_name(task);
  summary["seeds"] = fc.seeds;
  summary["per_seed"] = per_seed_metric;
  summary["mean"] = mean_of(per_seed_metric);
  summary["std"] = stddev_of(per_seed_metric);
  summary["best_seed"] = best->seed;
  summary["initialization"] = random_init ? "random" : args.checkpoint_path;
  write_file(args.out_dir + "/summary.json", summary.dump(2) + "\n");

  FinetuneCheckpoint ckpt;
  ckpt.config = best->model.encoder.config;
  ckpt.model = best->model;
  ckpt.vocab = vocab;
  ckpt.lexicon = lexicon;
  ckpt.task = task;
  ckpt.labels = labels;
  ckpt.mlp_hidden = fc.mlp_hidden;
  ckpt.extra = summary;
  const std::string ckpt_path = args.out_dir + "/task_checkpoint.bin";
  save_finetune_checkpoint(ckpt_path, ckpt);
  std::cout << "finetune " << to_string(task) << ": " << primary_metric_name(task) << " mean "
            << summary["mean"].dump() << " std " << summary["std"].dump() << "; checkpoint " << ckpt_path
            << "\n";
  return ckpt_path;
}

void cmd_evaluate(const EvaluateArgs& args) {
  ensure_dir(args.out_dir);
  auto ckpt = load_finetune_checkpoint(args.checkpoint_path);
  LabelSet labels = ckpt.labels;
  if (args.labels_path) labels = read_label_set(*args.labels_path);
  TaskData data = read_task_jsonl(ckpt.task, args.data_path, labels);
  auto eval = evaluate_task(ckpt.model, ckpt.vocab, data);

  nlohmann::ordered_json metrics;
  for (const auto& [name, value] : eval.metrics) metrics[name] = value;
  write_file(args.out_dir + "/metrics.json", metrics.dump(2) + "\n");

  std::ofstream dump(args.out_dir + "/predictions.jsonl", std::ios::binary);
  if (!dump) throw std::runtime_error("cannot write predictions");
  for (const auto& [id, prediction] : eval.predictions) {
    nlohmann::ordered_json j;
    j["example_id"] = id;
    j["prediction"] = prediction;
    dump << j.dump() << "\n";
  }
  std::cout << "evaluate " << to_string(ckpt.task) << ": " << metrics.dump() << "\n";
}

void cmd_attn_report(const AttnReportArgs& args) {
  if (args.checkpoint_paths.empty()) throw std::invalid_argument("attn-report: no checkpoints given");
  TaskData data = read_task_jsonl(TaskKind::ere, args.data_path);
  std::vector<AttentionReport> reports;
  for (const auto& path : args.checkpoint_paths) {
    auto bundle = load_encoder_bundle(path);
    reports.push_back(category_report(data.ere, bundle.encoder, bundle.vocab, bundle.lexicon));
  }
  auto averaged = average_reports(reports);
  write_file(args.out_prefix + ".csv", attention_report_csv(averaged));
  write_file(args.out_prefix + ".json", attention_report_json(averaged).dump(2) + "\n");
  std::cout << "attention report over " << data.ere.size() << " examples and " << reports.size()
            << " checkpoint(s) -> " << args.out_prefix << ".{csv,json}\n";
}

std::vector<int> read_ere_prediction_dump(const std::string& path, std::span<const EREExample> examples) {
  auto map = read_prediction_map(path);
  std::vector<int> preds;
  preds.reserve(examples.size());
  for (const auto& ex : examples) {
    auto it = map.find(ex.example_id);
    if (it == map.end())
      throw std::runtime_error("prediction dump " + path + " is missing example " + ex.example_id);
    preds.push_back(it->second.get<int>());
  }
  if (map.size() != examples.size())
    throw std::runtime_error("prediction dump " + path + " does not cover the same example set");
  return preds;
}

void cmd_heatmap(const HeatmapArgs& args) {
  TaskData data = read_task_jsonl(TaskKind::ere, args.data_path);
  LabelSet labels = labels_for_data(args.labels_path, data.ere);
  auto preds_a = read_ere_prediction_dump(args.predictions_a, data.ere);
  auto preds_b = read_ere_prediction_dump(args.predictions_b, data.ere);
  auto result = heatmap_deltas(data.ere, preds_a, preds_b, labels, TemporalLexicon::load_default(),
                               args.min_samples);
  write_file(args.out_path, heatmap_json(result).dump(2) + "\n");
  std::cout << "heatmap with " << result.categories.size() << " categories x " << labels.size()
            << " labels -> " << args.out_path << "\n";
}

double cmd_mcnemar(const McNemarArgs& args) {
  const TaskKind task = task_kind_from_string(args.task);
  LabelSet labels;
  if (args.labels_path) labels = read_label_set(*args.labels_path);
  TaskData data = read_task_jsonl(task, args.data_path, labels);
  auto map_a = read_prediction_map(args.predictions_a);
  auto map_b = read_prediction_map(args.predictions_b);

  auto correctness = [&](const std::map<std::string, nlohmann::json>& preds) {
    std::vector<int> out;
    auto get = [&](const std::string& id) {
      auto it = preds.find(id);
      if (it == preds.end()) throw std::runtime_error("prediction dump is missing example " + id);
      return it->second;
    };
    switch (task) {
      case TaskKind::ere:
        for (const auto& ex : data.ere) out.push_back(get(ex.example_id).get<int>() == ex.relation ? 1 : 0);
        break;
      case TaskKind::binary_qa:
        for (const auto& ex : data.binary) out.push_back(get(ex.example_id).get<int>() == ex.label ? 1 : 0);
        break;
      case TaskKind::extractive_qa:
        for (const auto& ex : data.extractive) {
          std::set<int> pred, gold;
          for (int t : get(ex.example_id).get<std::vector<int>>()) pred.insert(t);
          for (int t = 0; t < (int)ex.answer_labels.size(); ++t)
            if (ex.answer_labels[t] == 1) gold.insert(t);
          out.push_back(exact_match(pred, gold));
        }
        break;
    }
    return out;
  };

  auto result = mcnemar(correctness(map_a), correctness(map_b));
  std::cout << "mcnemar: b=" << result.b << " c=" << result.c << " statistic=" << result.statistic
            << " p=" << result.p_value << "\n";
  return result.p_value;
}

void cmd_gen_synth(const GenSynthArgs& args) {
  ensure_dir(args.out_dir);
  auto write_split = [&](const TaskData& all) {
    if (args.train_split <= 0.0) {
      write_task_jsonl(all, args.out_dir + "/data.jsonl");
      return;
    }
    const size_t n = all.size();
    const size_t n_train = (size_t)std::llround(args.train_split * double(n));
    const size_t n_dev = (n - n_train) / 2;
    auto slice = [&](size_t begin, size_t end) {
      TaskData part;
      part.kind = all.kind;
      part.labels = all.labels;
      switch (all.kind) {
        case TaskKind::ere:
          part.ere.assign(all.ere.begin() + begin, all.ere.begin() + end);
          break;
        case TaskKind::extractive_qa:
          part.extractive.assign(all.extractive.begin() + begin, all.extractive.begin() + end);
          break;
        case TaskKind::binary_qa:
          part.binary.assign(all.binary.begin() + begin, all.binary.begin() + end);
          break;
      }
      return part;
    };
    write_task_jsonl(slice(0, n_train), args.out_dir + "/train.jsonl");
    write_task_jsonl(slice(n_train, n_train + n_dev), args.out_dir + "/dev.jsonl");
    write_task_jsonl(slice(n_train + n_dev, n), args.out_dir + "/test.jsonl");
  };

  if (args.what == "corpus") {
    auto docs = synth_documents(args.count, 3, args.seed);
    std::string text;
    for (const auto& d : docs) {
      text += d;
      text += "\n\n";
    }
    write_file(args.out_dir + "/synth_corpus.txt", text);
    std::cout << "wrote " << docs.size() << " synthetic documents\n";
  } else if (args.what == "ere") {
    auto data = synth_ere(args.count, args.seed);
    TaskData td;
    td.kind = TaskKind::ere;
    td.labels = data.labels;
    td.ere = data.examples;
    write_label_set(td.labels, args.out_dir + "/labels.json");
    write_split(td);
    std::cout << "wrote " << td.ere.size() << " synthetic relation examples\n";
  } else if (args.what == "extractive_qa") {
    TaskData td;
    td.kind = TaskKind::extractive_qa;
    td.extractive = synth_extractive_qa(args.count, args.seed);
    write_split(td);
    std::cout << "wrote " << td.extractive.size() << " synthetic extractive questions\n";
  } else if (args.what == "binary_qa") {
    TaskData td;
    td.kind = TaskKind::binary_qa;
    td.binary = synth_binary_qa(args.count, args.seed);
    write_split(td);
    std::cout << "wrote " << td.binary.size() << " synthetic binary questions\n";
  } else {
    throw std::invalid_argument("gen-synth: unknown kind '" + args.what +
                                "' (corpus | ere | extractive_qa | binary_qa)");
  }
}

}  // namespace econet

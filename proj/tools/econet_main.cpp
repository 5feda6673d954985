#include <exception>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "econet/commands.hpp"

using namespace econet;

namespace {

RunConfig load_config_or_default(const std::string& path) {
  return path.empty() ? RunConfig::defaults() : RunConfig::from_file(path);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"continual pre-training and evaluation toolkit for event temporal reasoning"};
  app.require_subcommand(1);

  // build-corpus
  auto* build = app.add_subcommand("build-corpus", "extract masked training samples from raw text");
  BuildCorpusArgs build_args;
  std::string build_lexicon, build_event_lexicon, build_exclusion;
  build->add_option("--input-dir", build_args.input_dir, "directory of UTF-8 .txt documents")->required();
  build->add_option("--out", build_args.out_path, "output JSONL path")->required();
  build->add_option("--budget", build_args.budget, "total sample budget (half per kind)");
  build->add_option("--lexicon", build_lexicon, "category<TAB>indicator lexicon file");
  build->add_option("--event-lexicon", build_event_lexicon, "extra event verb base forms, one per line");
  build->add_option("--exclusion", build_exclusion, "passage-hash exclusion list");

  // pretrain
  auto* pre = app.add_subcommand("pretrain", "run continual pre-training over a sample file");
  std::string pre_config, pre_corpus, pre_out, pre_resume, pre_mode;
  long pre_steps = -1;
  pre->add_option("--config", pre_config, "run config file");
  pre->add_option("--corpus", pre_corpus, "masked sample JSONL")->required();
  pre->add_option("--out-dir", pre_out, "output directory")->required();
  pre->add_option("--resume", pre_resume, "checkpoint to resume from");
  pre->add_option("--mode", pre_mode, "override pretrain.mode (econet | generator_only | random_mask)");
  pre->add_option("--max-steps", pre_steps, "override pretrain.max_steps");

  // finetune
  auto* fin = app.add_subcommand("finetune", "fine-tune a checkpoint on a task dataset");
  std::string fin_config, fin_ckpt, fin_data, fin_out, fin_task;
  double fin_fraction = -1.0;
  fin->add_option("--config", fin_config, "run config file");
  fin->add_option("--checkpoint", fin_ckpt, "pretrain checkpoint (omit for random init)");
  fin->add_option("--data-dir", fin_data, "directory with train.jsonl/dev.jsonl (+labels.json)")->required();
  fin->add_option("--out-dir", fin_out, "output directory")->required();
  fin->add_option("--task", fin_task, "override finetune.task (ere | extractive_qa | binary_qa)");
  fin->add_option("--train-fraction", fin_fraction, "override finetune.train_fraction");

  // evaluate
  auto* eval = app.add_subcommand("evaluate", "evaluate a task checkpoint and dump predictions");
  EvaluateArgs eval_args;
  std::string eval_labels;
  eval->add_option("--checkpoint", eval_args.checkpoint_path, "task checkpoint")->required();
  eval->add_option("--data", eval_args.data_path, "task JSONL")->required();
  eval->add_option("--labels", eval_labels, "label set JSON (defaults to the checkpoint's)");
  eval->add_option("--out-dir", eval_args.out_dir, "output directory")->required();

  // attn-report
  auto* attn = app.add_subcommand("attn-report", "aggregate attention onto temporal indicators");
  AttnReportArgs attn_args;
  attn->add_option("--checkpoint", attn_args.checkpoint_paths, "checkpoint(s); several are averaged")
      ->required()
      ->expected(-1);
  attn->add_option("--data", attn_args.data_path, "ERE JSONL with event pairs")->required();
  attn->add_option("--out-prefix", attn_args.out_prefix, "output prefix for .csv/.json")->required();

  // heatmap
  auto* heat = app.add_subcommand("heatmap", "category x label F1 deltas between two prediction dumps");
  HeatmapArgs heat_args;
  std::string heat_labels;
  heat->add_option("--data", heat_args.data_path, "ERE JSONL")->required();
  heat->add_option("--labels", heat_labels, "label set JSON");
  heat->add_option("--preds-a", heat_args.predictions_a, "baseline prediction dump")->required();
  heat->add_option("--preds-b", heat_args.predictions_b, "comparison prediction dump")->required();
  heat->add_option("--out", heat_args.out_path, "output JSON path")->required();
  heat->add_option("--min-samples", heat_args.min_samples, "category sample threshold (default 50)");

  // mcnemar
  auto* mc = app.add_subcommand("mcnemar", "paired significance test between two prediction dumps");
  McNemarArgs mc_args;
  std::string mc_labels;
  mc->add_option("--data", mc_args.data_path, "task JSONL with gold labels")->required();
  mc->add_option("--task", mc_args.task, "ere | extractive_qa | binary_qa");
  mc->add_option("--labels", mc_labels, "label set JSON");
  mc->add_option("--preds-a", mc_args.predictions_a, "prediction dump A")->required();
  mc->add_option("--preds-b", mc_args.predictions_b, "prediction dump B")->required();

  // gen-synth
  auto* gen = app.add_subcommand("gen-synth", "generate synthetic corpus or task data");
  GenSynthArgs gen_args;
  gen->add_option("--what", gen_args.what, "corpus | ere | extractive_qa | binary_qa")->required();
  gen->add_option("--count", gen_args.count, "number of documents/examples");
  gen->add_option("--seed", gen_args.seed, "generator seed");
  gen->add_option("--out-dir", gen_args.out_dir, "output directory")->required();
  gen->add_option("--train-split", gen_args.train_split, "write train/dev/test splits with this fraction");

  CLI11_PARSE(app, argc, argv);

  try {
    if (build->parsed()) {
      if (!build_lexicon.empty()) build_args.lexicon_path = build_lexicon;
      if (!build_event_lexicon.empty()) build_args.event_lexicon_path = build_event_lexicon;
      if (!build_exclusion.empty()) build_args.exclusion_path = build_exclusion;
      cmd_build_corpus(build_args);
    } else if (pre->parsed()) {
      PretrainArgs args;
      args.config = load_config_or_default(pre_config);
      if (!pre_mode.empty()) args.config.pretrain.mode = pre_mode;
      if (pre_steps >= 0) args.config.pretrain.max_steps = pre_steps;
      args.corpus_path = pre_corpus;
      args.out_dir = pre_out;
      if (!pre_resume.empty()) args.resume_checkpoint = pre_resume;
      cmd_pretrain(args);
    } else if (fin->parsed()) {
      FinetuneArgs args;
      args.config = load_config_or_default(fin_config);
      if (!fin_task.empty()) args.config.finetune.task = fin_task;
      if (fin_fraction > 0) args.config.finetune.train_fraction = fin_fraction;
      args.checkpoint_path = fin_ckpt;
      args.data_dir = fin_data;
      args.out_dir = fin_out;
      cmd_finetune(args);
    } else if (eval->parsed()) {
      if (!eval_labels.empty()) eval_args.labels_path = eval_labels;
      cmd_evaluate(eval_args);
    } else if (attn->parsed()) {
      cmd_attn_report(attn_args);
    } else if (heat->parsed()) {
      if (!heat_labels.empty()) heat_args.labels_path = heat_labels;
      cmd_heatmap(heat_args);
    } else if (mc->parsed()) {
      if (!mc_labels.empty()) mc_args.labels_path = mc_labels;
      cmd_mcnemar(mc_args);
    } else if (gen->parsed()) {
      cmd_gen_synth(gen_args);
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error (invalid input): " << e.what() << "\n";
    return 2;
  } catch (const std::out_of_range& e) {
    std::cerr << "error (invalid input): " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error (runtime): " << e.what() << "\n";
    return 1;
  }
  return 0;
}

#pragma once

#include <string>
#include <vector>

#include "econet/task_heads.hpp"
#include "econet/trainer.hpp"

namespace econet {

// Declarative run configuration, stored as flat "key = value" lines
// ('#' comments). Unknown keys are rejected. Every run writes its
// resolved config next to its outputs; re-running from that file
// reproduces them.
struct RunConfig {
  ModelConfig model;  // desk-scale defaults
  struct Pretrain {
    std::string mode = "econet";  // econet | generator_only | random_mask
    double alpha = 1.0;
    double beta = 1.0;
    double r_percent = 50.0;
    double lr = 1e-3;
    int batch_size = 8;
    long max_steps = 2000;
    long checkpoint_interval = 500;
    long generator_warmup_steps = 0;
    uint64_t seed = 5;
  } pretrain;
  struct Finetune {
    std::string task = "ere";
    double lr = 1e-3;
    int batch_size = 4;
    int epochs = 10;
    std::vector<uint64_t> seeds = {5, 7, 23};
    double train_fraction = 1.0;
    int mlp_hidden = 64;
  } finetune;

  void validate() const;
  PretrainRunConfig pretrain_run_config() const;
  FinetuneConfig finetune_config() const;

  static RunConfig defaults();
  static RunConfig from_file(const std::string& path);
  std::string to_text() const;
  void apply_line(const std::string& key, const std::string& value, int line_no);
};

}  // namespace econet

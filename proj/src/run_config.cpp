#include "econet/run_config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace econet {

namespace {

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r");
  size_t e = s.find_last_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, e - b + 1);
}

long parse_long(const std::string& v, const std::string& key) {
  try {
    size_t used = 0;
    long out = std::stol(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return out;
  } catch (...) {
    throw std::invalid_argument("config key '" + key + "': expected an integer, got '" + v + "'");
  }
}

double parse_double(const std::string& v, const std::string& key) {
  try {
    size_t used = 0;
    double out = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return out;
  } catch (...) {
    throw std::invalid_argument("config key '" + key + "': expected a number, got '" + v + "'");
  }
}

std::vector<uint64_t> parse_seed_list(const std::string& v, const std::string& key) {
  std::vector<uint64_t> seeds;
  std::string item;
  std::istringstream in(v);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    seeds.push_back((uint64_t)parse_long(item, key));
  }
  if (seeds.empty()) throw std::invalid_argument("config key '" + key + "': seed list must be non-empty");
  return seeds;
}

}  // namespace

RunConfig RunConfig::defaults() { return RunConfig{}; }

void RunConfig::validate() const {
  ModelConfig check = model;
  check.vocab_size = 1;  // resolved later from the corpus
  check.validate();
  (void)pretrain_mode_from_string(pretrain.mode);
  (void)task_kind_from_string(finetune.task);
  if (pretrain.r_percent < 0 || pretrain.r_percent > 100)
    throw std::invalid_argument("pretrain.r_percent must be in [0,100]");
  if (pretrain.batch_size < 1 || finetune.batch_size < 1)
    throw std::invalid_argument("batch sizes must be positive");
  if (pretrain.max_steps < 0 || finetune.epochs < 0)
    throw std::invalid_argument("step/epoch counts must be non-negative");
  if (finetune.seeds.empty()) throw std::invalid_argument("finetune.seeds must be non-empty");
  if (finetune.train_fraction <= 0 || finetune.train_fraction > 1)
    throw std::invalid_argument("finetune.train_fraction must be in (0,1]");
}

PretrainRunConfig RunConfig::pretrain_run_config() const {
  PretrainRunConfig out;
  out.model = model;
  out.mode = pretrain_mode_from_string(pretrain.mode);
  out.alpha = pretrain.alpha;
  out.beta = pretrain.beta;
  out.r_percent = pretrain.r_percent;
  out.lr = pretrain.lr;
  out.batch_size = pretrain.batch_size;
  out.max_steps = pretrain.max_steps;
  out.checkpoint_interval = pretrain.checkpoint_interval;
  out.generator_warmup_steps = pretrain.generator_warmup_steps;
  out.seed = pretrain.seed;
  return out;
}

FinetuneConfig RunConfig::finetune_config() const {
  FinetuneConfig out;
  out.lr = finetune.lr;
  out.batch_size = finetune.batch_size;
  out.epochs = finetune.epochs;
  out.seeds = finetune.seeds;
  out.train_fraction = finetune.train_fraction;
  out.mlp_hidden = finetune.mlp_hidden;
  return out;
}

void RunConfig::apply_line(const std::string& key, const std::string& value, int line_no) {
  auto bad_key = [&] {
    throw std::invalid_argument("unknown config key '" + key + "' at line " + std::to_string(line_no));
  };
  if (key == "model.n_layers") model.n_layers = (int)parse_long(value, key);
  else if (key == "model.n_heads") model.n_heads = (int)parse_long(value, key);
  else if (key == "model.hidden_dim") model.hidden_dim = (int)parse_long(value, key);
  else if (key == "model.ffn_dim") model.ffn_dim = (int)parse_long(value, key);
  else if (key == "model.max_seq_len") model.max_seq_len = (int)parse_long(value, key);
  else if (key == "model.dropout") model.dropout_rate = parse_double(value, key);
  else if (key == "pretrain.mode") pretrain.mode = value;
  else if (key == "pretrain.alpha") pretrain.alpha = parse_double(value, key);
  else if (key == "pretrain.beta") pretrain.beta = parse_double(value, key);
  else if (key == "pretrain.r_percent") pretrain.r_percent = parse_double(value, key);
  else if (key == "pretrain.lr") pretrain.lr = parse_double(value, key);
  else if (key == "pretrain.batch_size") pretrain.batch_size = (int)parse_long(value, key);
  else if (key == "pretrain.max_steps") pretrain.max_steps = parse_long(value, key);
  else if (key == "pretrain.checkpoint_interval") pretrain.checkpoint_interval = parse_long(value, key);
  else if (key == "pretrain.generator_warmup_steps") pretrain.generator_warmup_steps = parse_long(value, key);
  else if (key == "pretrain.seed") pretrain.seed = (uint64_t)parse_long(value, key);
  else if (key == "finetune.task") finetune.task = value;
  else if (key == "finetune.lr") finetune.lr = parse_double(value, key);
  else if (key == "finetune.batch_size") finetune.batch_size = (int)parse_long(value, key);
  else if (key == "finetune.epochs") finetune.epochs = (int)parse_long(value, key);
  else if (key == "finetune.seeds") finetune.seeds = parse_seed_list(value, key);
  else if (key == "finetune.train_fraction") finetune.train_fraction = parse_double(value, key);
  else if (key == "finetune.mlp_hidden") finetune.mlp_hidden = (int)parse_long(value, key);
  else bad_key();
}

RunConfig RunConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  RunConfig config;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    auto eq = t.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": expected 'key = value'");
    config.apply_line(trim(t.substr(0, eq)), trim(t.substr(eq + 1)), line_no);
  }
  config.validate();
  return config;
}

std::string RunConfig::to_text() const {
  std::ostringstream out;
  char buf[64];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
  };
  out << "model.n_layers = " << model.n_layers << "\n";
  out << "model.n_heads = " << model.n_heads << "\n";
  out << "model.hidden_dim = " << model.hidden_dim << "\n";
  out << "model.ffn_dim = " << model.ffn_dim << "\n";
  out << "model.max_seq_len = " << model.max_seq_len << "\n";
  out << "model.dropout = " << num(model.dropout_rate) << "\n";
  out << "pretrain.mode = " << pretrain.mode << "\n";
  out << "pretrain.alpha = " << num(pretrain.alpha) << "\n";
  out << "pretrain.beta = " << num(pretrain.beta) << "\n";
  out << "pretrain.r_percent = " << num(pretrain.r_percent) << "\n";
  out << "pretrain.lr = " << num(pretrain.lr) << "\n";
  out << "pretrain.batch_size = " << pretrain.batch_size << "\n";
  out << "pretrain.max_steps = " << pretrain.max_steps << "\n";
  out << "pretrain.checkpoint_interval = " << pretrain.checkpoint_interval << "\n";
  out << "pretrain.generator_warmup_steps = " << pretrain.generator_warmup_steps << "\n";
  out << "pretrain.seed = " << pretrain.seed << "\n";
  out << "finetune.task = " << finetune.task << "\n";
  out << "finetune.lr = " << num(finetune.lr) << "\n";
  out << "finetune.batch_size = " << finetune.batch_size << "\n";
  out << "finetune.epochs = " << finetune.epochs << "\n";
  out << "finetune.seeds = ";
  for (size_t i = 0; i < finetune.seeds.size(); ++i) out << (i ? "," : "") << finetune.seeds[i];
  out << "\n";
  out << "finetune.train_fraction = " << num(finetune.train_fraction) << "\n";
  out << "finetune.mlp_hidden = " << finetune.mlp_hidden << "\n";
  return out.str();
}

}  // namespace econet

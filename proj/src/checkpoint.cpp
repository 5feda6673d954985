#include "econet/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <stdexcept>

namespace econet {

namespace {
constexpr char kMagic[] = "ECONETCKPT1\n";
constexpr size_t kMagicLen = sizeof(kMagic) - 1;
}  // namespace

void write_raw_checkpoint(const std::string& path, nlohmann::ordered_json meta,
                          const std::vector<ConstTensorView>& blocks) {
  nlohmann::ordered_json manifest = nlohmann::ordered_json::array();
  for (const auto& b : blocks) manifest.push_back({{"name", b.name}, {"size", b.size}});
  meta["blocks"] = std::move(manifest);
  const std::string header = meta.dump();

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open checkpoint for writing: " + path);
  out.write(kMagic, kMagicLen);
  uint64_t len = header.size();
  out.write(reinterpret_cast<const char*>(&len), sizeof(len));
  out.write(header.data(), (std::streamsize)header.size());
  for (const auto& b : blocks)
    out.write(reinterpret_cast<const char*>(b.data), (std::streamsize)(b.size * sizeof(double)));
  if (!out) throw std::runtime_error("checkpoint write failed: " + path);
}

RawCheckpoint read_raw_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
  char magic[kMagicLen];
  in.read(magic, kMagicLen);
  if (!in || std::memcmp(magic, kMagic, kMagicLen) != 0)
    throw std::runtime_error("not a checkpoint file: " + path);
  uint64_t len = 0;
  in.read(reinterpret_cast<char*>(&len), sizeof(len));
  std::string header(len, '\0');
  in.read(header.data(), (std::streamsize)len);
  if (!in) throw std::runtime_error("truncated checkpoint header: " + path);
  RawCheckpoint ckpt;
  ckpt.meta = nlohmann::ordered_json::parse(header);
  for (const auto& entry : ckpt.meta.at("blocks")) {
    std::string name = entry.at("name").get<std::string>();
    auto size = entry.at("size").get<Eigen::Index>();
    std::vector<double> data((size_t)size);
    in.read(reinterpret_cast<char*>(data.data()), (std::streamsize)(size * sizeof(double)));
    if (!in) throw std::runtime_error("truncated checkpoint block '" + name + "': " + path);
    ckpt.blocks.emplace_back(std::move(name), std::move(data));
  }
  return ckpt;
}

nlohmann::ordered_json model_config_to_json(const ModelConfig& c) {
  return {{"n_layers", c.n_layers},   {"n_heads", c.n_heads},       {"hidden_dim", c.hidden_dim},
          {"ffn_dim", c.ffn_dim},     {"vocab_size", c.vocab_size}, {"max_seq_len", c.max_seq_len},
          {"dropout_rate", c.dropout_rate}};
}

ModelConfig model_config_from_json(const nlohmann::json& j) {
  ModelConfig c;
  c.n_layers = j.at("n_layers").get<int>();
  c.n_heads = j.at("n_heads").get<int>();
  c.hidden_dim = j.at("hidden_dim").get<int>();
  c.ffn_dim = j.at("ffn_dim").get<int>();
  c.vocab_size = j.at("vocab_size").get<int>();
  c.max_seq_len = j.at("max_seq_len").get<int>();
  c.dropout_rate = j.at("dropout_rate").get<double>();
  c.validate();
  return c;
}

Vocabulary vocabulary_from_tokens(const std::vector<std::string>& tokens) {
  Vocabulary vocab;
  if (tokens.size() < 4 || tokens[0] != "<unk>" || tokens[1] != "<mask>" || tokens[2] != "<cls>" ||
      tokens[3] != "<sep>")
    throw std::runtime_error("vocabulary does not start with the reserved tokens");
  for (size_t i = 4; i < tokens.size(); ++i) vocab.add(tokens[i]);
  return vocab;
}

EventVocabulary event_vocabulary_from_forms(const std::vector<std::string>& forms) {
  EventVocabulary vocab;
  for (const auto& f : forms) vocab.add(f);
  return vocab;
}

nlohmann::ordered_json lexicon_to_json(const TemporalLexicon& lexicon) {
  nlohmann::ordered_json cats = nlohmann::ordered_json::array();
  for (int c = 0; c < lexicon.category_count(); ++c)
    cats.push_back({{"name", lexicon.category_name(c)}, {"members", lexicon.category_members(c)}});
  return cats;
}

TemporalLexicon lexicon_from_json(const nlohmann::json& j) {
  std::vector<std::pair<std::string, std::vector<std::string>>> cats;
  for (const auto& c : j)
    cats.emplace_back(c.at("name").get<std::string>(), c.at("members").get<std::vector<std::string>>());
  return TemporalLexicon::from_entries(cats);
}

namespace {

template <typename Model>
void fill_from_blocks(Model& model, const RawCheckpoint& raw, size_t begin, size_t count,
                      const std::string& what) {
  auto views = tensor_views(model);
  if (views.size() != count) throw std::runtime_error("checkpoint block count mismatch for " + what);
  for (size_t i = 0; i < count; ++i) {
    const auto& [name, data] = raw.blocks[begin + i];
    if (name != views[i].name && name.substr(name.find('/') + 1) != views[i].name)
      throw std::runtime_error("checkpoint block order mismatch: expected " + views[i].name + ", found " +
                               name);
    if ((Eigen::Index)data.size() != views[i].size)
      throw std::runtime_error("checkpoint block size mismatch at " + name);
    std::memcpy(views[i].data, data.data(), data.size() * sizeof(double));
  }
}

}  // namespace

void save_pretrain_checkpoint(const std::string& path, const PretrainCheckpoint& ckpt) {
  nlohmann::ordered_json meta;
  meta["format"] = "econet-checkpoint";
  meta["kind"] = "pretrain";
  meta["config"] = model_config_to_json(ckpt.config);
  meta["event_vocab_size"] = ckpt.event_vocab.size();
  meta["step"] = ckpt.step;
  meta["rng_state"] = ckpt.rng_state;
  meta["has_optimizer"] = ckpt.adam.has_value();
  if (ckpt.adam) meta["adam_step"] = ckpt.adam->step;
  meta["vocab"] = ckpt.vocab.all_tokens();
  nlohmann::ordered_json event_forms = nlohmann::ordered_json::array();
  for (int i = 0; i < ckpt.event_vocab.size(); ++i) event_forms.push_back(ckpt.event_vocab.form(i));
  meta["event_vocab"] = std::move(event_forms);
  meta["lexicon"] = lexicon_to_json(ckpt.lexicon);
  if (!ckpt.extra.is_null()) meta["run"] = ckpt.extra;

  std::vector<ConstTensorView> blocks;
  visit_tensors(ckpt.model, [&](const std::string& name, const auto& t) {
    blocks.push_back({"model/" + name, t.data(), t.size()});
  });
  if (ckpt.adam) {
    visit_tensors(ckpt.adam->m, [&](const std::string& name, const auto& t) {
      blocks.push_back({"adam_m/" + name, t.data(), t.size()});
    });
    visit_tensors(ckpt.adam->v, [&](const std::string& name, const auto& t) {
      blocks.push_back({"adam_v/" + name, t.data(), t.size()});
    });
  }
  write_raw_checkpoint(path, std::move(meta), blocks);
}

PretrainCheckpoint load_pretrain_checkpoint(const std::string& path) {
  RawCheckpoint raw = read_raw_checkpoint(path);
  if (raw.meta.value("kind", "") != "pretrain")
    throw std::runtime_error("not a pretrain checkpoint: " + path);
  PretrainCheckpoint ckpt;
  ckpt.config = model_config_from_json(raw.meta.at("config"));
  const int event_vocab_size = raw.meta.at("event_vocab_size").get<int>();
  ckpt.model = EconetModel::zeros(ckpt.config, event_vocab_size);
  ckpt.vocab = vocabulary_from_tokens(raw.meta.at("vocab").get<std::vector<std::string>>());
  ckpt.event_vocab =
      event_vocabulary_from_forms(raw.meta.at("event_vocab").get<std::vector<std::string>>());
  ckpt.lexicon = lexicon_from_json(raw.meta.at("lexicon"));
  ckpt.step = raw.meta.at("step").get<long>();
  ckpt.rng_state = raw.meta.at("rng_state").get<std::string>();
  if (raw.meta.contains("run")) ckpt.extra = raw.meta.at("run");

  const size_t model_blocks = tensor_views(ckpt.model).size();
  fill_from_blocks(ckpt.model, raw, 0, model_blocks, "model");
  if (raw.meta.at("has_optimizer").get<bool>()) {
    AdamState<EconetModel> adam;
    adam.m = EconetModel::zeros(ckpt.config, event_vocab_size);
    adam.v = EconetModel::zeros(ckpt.config, event_vocab_size);
    adam.step = raw.meta.at("adam_step").get<long>();
    fill_from_blocks(adam.m, raw, model_blocks, model_blocks, "adam.m");
    fill_from_blocks(adam.v, raw, 2 * model_blocks, model_blocks, "adam.v");
    ckpt.adam = std::move(adam);
  }
  return ckpt;
}

}  // namespace econet

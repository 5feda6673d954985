#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "econet/mask_builder.hpp"
#include "econet/text.hpp"

using namespace econet;

namespace {

std::vector<std::string> words(const std::string& s) { return tokenize_lower(s); }

// Independent check that a sentence contains some indicator, by direct
// window comparison against the lexicon entries.
bool oracle_has_indicator(const std::vector<std::string>& tokens, const TemporalLexicon& lex) {
  for (int id = 0; id < lex.size(); ++id) {
    std::vector<std::string> ws;
    std::string w;
    for (char c : lex.indicator(id)) {
      if (c == ' ') {
        ws.push_back(w);
        w.clear();
      } else {
        w.push_back(c);
      }
    }
    ws.push_back(w);
    for (size_t p = 0; p + ws.size() <= tokens.size(); ++p) {
      bool ok = true;
      for (size_t k = 0; k < ws.size(); ++k)
        if (to_lower(tokens[p + k]) != ws[k]) {
          ok = false;
          break;
        }
      if (ok) return true;
    }
  }
  return false;
}

std::vector<std::string> random_tokens(std::mt19937_64& rng, const TemporalLexicon& lex, bool force_indicator) {
  static const std::vector<std::string> filler = {"the",  "army",  "voted", "storm", "bank", "report",
                                                  "fell", "crowd", "left",  "city",  "for",  "a"};
  std::uniform_int_distribution<int> len_dist(3, 12);
  std::vector<std::string> tokens;
  int len = len_dist(rng);
  for (int i = 0; i < len; ++i) tokens.push_back(filler[rng() % filler.size()]);
  if (force_indicator || rng() % 3 == 0) {
    std::string ind = lex.indicator((int)(rng() % lex.size()));
    std::vector<std::string> ws;
    std::string w;
    for (char c : ind) {
      if (c == ' ') {
        ws.push_back(w);
        w.clear();
      } else {
        w.push_back(c);
      }
    }
    ws.push_back(w);
    size_t at = rng() % (tokens.size() + 1);
    tokens.insert(tokens.begin() + at, ws.begin(), ws.end());
  }
  return tokens;
}

}  // namespace

TEST_CASE("extract_passages windows an indicator sentence with its follower") {
  auto lex = TemporalLexicon::load_default();
  std::vector<std::vector<std::string>> sents = {
      words("the market opened flat"),
      words("shares fell after the report"),
      words("traders went home"),
  };
  auto passages = extract_passages(sents, lex, "d0");
  REQUIRE(passages.size() == 1);
  CHECK(passages[0].source_id == "d0:1");
  auto want = words("shares fell after the report traders went home");
  CHECK(passages[0].tokens == want);
}

TEST_CASE("extract_passages: last sentence stands alone, no indicator means none") {
  auto lex = TemporalLexicon::load_default();
  std::vector<std::vector<std::string>> sents = {words("the market opened flat"),
                                                 words("shares fell after the report")};
  auto passages = extract_passages(sents, lex, "d0");
  REQUIRE(passages.size() == 1);
  CHECK(passages[0].tokens == words("shares fell after the report"));

  std::vector<std::vector<std::string>> none = {words("the market opened flat")};
  CHECK(extract_passages(none, lex, "d0").empty());
}

TEST_CASE("passage count matches an exhaustive scan over 1000 synthetic sentences") {
  auto lex = TemporalLexicon::load_default();
  std::mt19937_64 rng(555);
  std::vector<std::vector<std::string>> sents;
  for (int i = 0; i < 1000; ++i) sents.push_back(random_tokens(rng, lex, false));
  auto passages = extract_passages(sents, lex, "d");
  long oracle_count = 0;
  for (const auto& s : sents)
    if (oracle_has_indicator(s, lex)) ++oracle_count;
  CHECK((long)passages.size() == oracle_count);
}

TEST_CASE("temporal sample masks the first indicator") {
  auto lex = TemporalLexicon::load_default();
  Passage p{words("the auction closed and the painting moved following the sale"), "d0:0"};
  auto matches = lex.find_indicators(p.tokens);
  REQUIRE(!matches.empty());
  CHECK(matches[0].begin == 7);
  auto s = build_temporal_sample(p, matches);
  CHECK(s.mask_pos == 7);
  CHECK(s.gold == "following");
  CHECK(s.kind == 1);
  CHECK(s.gold_label_id == lex.id_of("following"));
  CHECK(s.tokens[7] == kMaskToken);
}

TEST_CASE("multi-word indicator collapses to one mask token") {
  auto lex = TemporalLexicon::load_default();
  Passage p{words("the gauges were read prior to the collapse"), "d0:0"};
  auto matches = lex.find_indicators(p.tokens);
  REQUIRE(matches[0].begin == 4);
  REQUIRE(matches[0].end == 6);
  auto s = build_temporal_sample(p, matches);
  CHECK(s.tokens.size() == p.tokens.size() - 1);
  CHECK(s.mask_pos == 4);
  CHECK(s.gold == "prior to");
  CHECK(s.tokens[4] == kMaskToken);
}

TEST_CASE("temporal sample errors without matches") {
  Passage p{words("no indicators here"), "d0:0"};
  CHECK_THROWS(build_temporal_sample(p, {}));
}

TEST_CASE("de-masking reconstructs the original passage") {
  auto lex = TemporalLexicon::load_default();
  std::mt19937_64 rng(303);
  int built = 0;
  for (int trial = 0; built < 100 && trial < 2000; ++trial) {
    Passage p{random_tokens(rng, lex, true), "d:0"};
    auto matches = lex.find_indicators(p.tokens);
    if (matches.empty()) continue;
    auto s = build_temporal_sample(p, matches);
    // Re-insert the gold (splitting multi-word golds back into words).
    std::vector<std::string> rebuilt(s.tokens.begin(), s.tokens.begin() + s.mask_pos);
    std::string w;
    for (char c : s.gold) {
      if (c == ' ') {
        rebuilt.push_back(w);
        w.clear();
      } else {
        w.push_back(c);
      }
    }
    rebuilt.push_back(w);
    rebuilt.insert(rebuilt.end(), s.tokens.begin() + s.mask_pos + 1, s.tokens.end());
    CHECK(rebuilt == p.tokens);
    ++built;
  }
  CHECK(built == 100);
}

TEST_CASE("event sample masks the trigger nearest the first indicator") {
  EventVocabulary vocab;
  Passage p{words("a b smiled c d e f after g jumped h"), "d:0"};
  auto lex = TemporalLexicon::load_default();
  auto matches = lex.find_indicators(p.tokens);
  REQUIRE(matches.size() == 1);
  REQUIRE(matches[0].begin == 7);
  std::vector<TriggerSpan> triggers = {{2, "smiled"}, {9, "jumped"}};
  auto s = build_event_sample(p, matches, triggers, vocab);
  CHECK(s.mask_pos == 9);
  CHECK(s.gold == "jumped");
  CHECK(s.kind == 0);
  CHECK(s.gold_label_id == 0);
}

TEST_CASE("event sample tie-breaks toward the earlier trigger") {
  EventVocabulary vocab;
  Passage p{words("a b c d e ran f after g jumped h"), "d:0"};
  auto lex = TemporalLexicon::load_default();
  auto matches = lex.find_indicators(p.tokens);
  REQUIRE(matches[0].begin == 7);
  std::vector<TriggerSpan> triggers = {{5, "ran"}, {9, "jumped"}};
  auto s = build_event_sample(p, matches, triggers, vocab);
  CHECK(s.mask_pos == 5);
  CHECK(s.gold == "ran");
}

TEST_CASE("event sample errors without triggers") {
  EventVocabulary vocab;
  auto lex = TemporalLexicon::load_default();
  Passage p{words("it happened after dawn"), "d:0"};
  auto matches = lex.find_indicators(p.tokens);
  CHECK_THROWS(build_event_sample(p, matches, {}, vocab));
}

TEST_CASE("emitted event samples always mask a tagger trigger (replay)") {
  auto lex = TemporalLexicon::load_default();
  auto tagger = EventTagger::with_default_lexicon();
  std::vector<std::string> docs = {
      "The army attacked the village before dawn. Rebels seized the airport after troops withdrew. "
      "Prices collapsed when the bank failed. The president resigned following the scandal.",
      "Shares plunged while investors waited for the report. The union suspended the strike after talks resumed.",
  };
  auto result = build_corpus(docs, lex, tagger, {});
  int event_count = 0;
  for (const auto& s : result.samples) {
    if (s.kind != 0) continue;
    ++event_count;
    // Replay: rebuild the passage and confirm the masked position is a trigger.
    auto passage_tokens = s.tokens;
    passage_tokens[s.mask_pos] = s.gold;
    auto matches = lex.find_indicators(passage_tokens);
    auto triggers = tagger.tag(passage_tokens, matches);
    bool found = false;
    for (const auto& t : triggers)
      if (t.position == s.mask_pos) found = true;
    CHECK(found);
  }
  CHECK(event_count > 0);
}

TEST_CASE("jsonl round-trip preserves samples and field order") {
  MaskedSample s;
  s.tokens = {"the", "painting", "moved", "<mask>", "the", "sale"};
  s.mask_pos = 3;
  s.gold = "following";
  s.kind = 1;
  s.gold_label_id = 7;
  s.source_id = "doc0:0";
  std::string line = sample_to_json_line(s);
  CHECK(line.find("\"tokens\"") < line.find("\"mask_pos\""));
  CHECK(line.find("\"mask_pos\"") < line.find("\"gold\""));
  CHECK(line.find("\"kind\":1") != std::string::npos);
  auto back = sample_from_json_line(line, 1);
  CHECK(back == s);
}

TEST_CASE("jsonl volume round-trip") {
  std::mt19937_64 rng(99);
  auto lex = TemporalLexicon::load_default();
  std::vector<MaskedSample> samples;
  EventVocabulary vocab;
  for (int i = 0; i < 10000; ++i) {
    Passage p{random_tokens(rng, lex, true), "d" + std::to_string(i) + ":0"};
    auto matches = lex.find_indicators(p.tokens);
    if (matches.empty()) continue;
    samples.push_back(build_temporal_sample(p, matches));
  }
  REQUIRE(samples.size() > 9000);
  std::string path = "volume_roundtrip.jsonl";
  write_samples_jsonl(samples, path);
  auto back = read_samples_jsonl(path);
  CHECK(back == samples);
  std::remove(path.c_str());
}

TEST_CASE("malformed jsonl reports the line number") {
  std::string path = "malformed.jsonl";
  {
    std::ofstream out(path);
    out << R"({"tokens":["<mask>"],"mask_pos":0,"gold":"after","kind":1,"gold_label_id":0,"source_id":"a"})" << "\n";
    out << "{not json}\n";
  }
  try {
    read_samples_jsonl(path);
    FAIL("expected a parse error");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
  std::remove(path.c_str());
}

TEST_CASE("budget keeps the kinds balanced") {
  auto lex = TemporalLexicon::load_default();
  auto tagger = EventTagger::with_default_lexicon();
  std::ostringstream doc;
  for (int i = 0; i < 60; ++i) doc << "The army attacked the village before dawn. ";
  std::vector<std::string> docs = {doc.str()};
  CorpusBuildOptions opt;
  opt.budget = 100;
  auto result = build_corpus(docs, lex, tagger, opt);
  long temporal = 0, event = 0;
  for (const auto& s : result.samples) (s.kind == 1 ? temporal : event)++;
  CHECK(temporal == 50);
  CHECK(event == 50);
  CHECK(result.stats.skipped_budget > 0);
}

TEST_CASE("exclusion list suppresses matching passages") {
  auto lex = TemporalLexicon::load_default();
  auto tagger = EventTagger::with_default_lexicon();
  std::vector<std::string> docs = {"The army attacked the village before dawn."};
  auto first = build_corpus(docs, lex, tagger, {});
  REQUIRE(!first.samples.empty());
  // Hash of the passage = de-masked tokens of the temporal sample.
  auto passage_tokens = first.samples[0].tokens;
  passage_tokens[first.samples[0].mask_pos] = first.samples[0].gold;
  CorpusBuildOptions opt;
  opt.excluded_passage_hashes.insert(passage_hash(passage_tokens));
  auto second = build_corpus(docs, lex, tagger, opt);
  CHECK(second.samples.empty());
  CHECK(second.stats.skipped_excluded == 1);
}

TEST_CASE("corpus build is deterministic") {
  auto lex = TemporalLexicon::load_default();
  auto tagger = EventTagger::with_default_lexicon();
  std::vector<std::string> docs = {
      "The army attacked before dawn. Rebels seized the airport after troops withdrew.",
      "Prices collapsed when the bank failed. Talks resumed later. The union celebrated in the end.",
  };
  auto a = build_corpus(docs, lex, tagger, {});
  auto b = build_corpus(docs, lex, tagger, {});
  REQUIRE(a.samples.size() == b.samples.size());
  CHECK(a.samples == b.samples);
  std::string pa = "corpus_a.jsonl", pb = "corpus_b.jsonl";
  write_samples_jsonl(a.samples, pa);
  write_samples_jsonl(b.samples, pb);
  std::ifstream fa(pa, std::ios::binary), fb(pb, std::ios::binary);
  std::stringstream sa, sb;
  sa << fa.rdbuf();
  sb << fb.rdbuf();
  CHECK(sa.str() == sb.str());
  std::remove(pa.c_str());
  std::remove(pb.c_str());
}

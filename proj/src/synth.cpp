#include "econet/synth.hpp"

#include <sstream>
#include <stdexcept>

namespace econet {

namespace {

struct VerbForms {
  const char* past;
  const char* participle;
  const char* gerund;
};

const std::vector<std::string> kSubjects = {
    "army",    "senate", "union",    "bank",    "court",   "council",  "agency",  "police",
    "rebels",  "workers", "farmers", "students", "ministry", "committee", "crowd", "airline"};

const std::vector<VerbForms> kVerbs = {
    {"attacked", "attacked", "attacking"},       {"voted", "voted", "voting"},
    {"marched", "marched", "marching"},          {"protested", "protested", "protesting"},
    {"resigned", "resigned", "resigning"},       {"surrendered", "surrendered", "surrendering"},
    {"celebrated", "celebrated", "celebrating"}, {"retreated", "retreated", "retreating"},
    {"invested", "invested", "investing"},       {"testified", "testified", "testifying"},
    {"negotiated", "negotiated", "negotiating"}, {"merged", "merged", "merging"},
    {"collapsed", "collapsed", "collapsing"},    {"expanded", "expanded", "expanding"},
    {"rallied", "rallied", "rallying"},          {"withdrew", "withdrawn", "withdrawing"}};

const std::vector<std::string> kBeforeIndicators = {"before", "until", "previous to",
                                                    "prior to", "preceding", "followed by"};
const std::vector<std::string> kAfterIndicators = {"after", "following", "since",
                                                   "now that", "soon after", "once"};
const std::vector<std::string> kDuringIndicators = {"during", "while", "when",
                                                    "at the time", "at the same time", "meanwhile"};

void append_words(std::vector<std::string>& tokens, const std::string& phrase) {
  std::string w;
  for (char c : phrase) {
    if (c == ' ') {
      tokens.push_back(w);
      w.clear();
    } else {
      w.push_back(c);
    }
  }
  tokens.push_back(w);
}

}  // namespace

SynthSentence synth_sentence(std::mt19937_64& rng) {
  SynthSentence s;
  s.category = int(rng() % 3);
  const std::string& s1 = kSubjects[rng() % kSubjects.size()];
  const std::string& s2 = kSubjects[rng() % kSubjects.size()];
  const size_t v1_idx = rng() % kVerbs.size();
  size_t v2_idx = rng() % kVerbs.size();
  while (v2_idx == v1_idx) v2_idx = rng() % kVerbs.size();
  const VerbForms& v1 = kVerbs[v1_idx];
  const VerbForms& v2 = kVerbs[v2_idx];
  switch (s.category) {
    case 0: s.indicator = kBeforeIndicators[rng() % kBeforeIndicators.size()]; break;
    case 1: s.indicator = kAfterIndicators[rng() % kAfterIndicators.size()]; break;
    default: s.indicator = kDuringIndicators[rng() % kDuringIndicators.size()]; break;
  }

  s.tokens = {"the", s1};
  s.v1_pos = (int)s.tokens.size();
  s.tokens.push_back(v1.past);
  append_words(s.tokens, s.indicator);
  s.tokens.push_back("the");
  s.tokens.push_back(s2);
  if (s.category == 1) {
    s.tokens.push_back("had");
    s.v2_pos = (int)s.tokens.size();
    s.tokens.push_back(v2.participle);
  } else if (s.category == 2) {
    s.tokens.push_back("was");
    s.v2_pos = (int)s.tokens.size();
    s.tokens.push_back(v2.gerund);
  } else {
    s.v2_pos = (int)s.tokens.size();
    s.tokens.push_back(v2.past);
  }
  s.tokens.push_back(".");
  return s;
}

std::vector<std::string> synth_documents(int n_docs, int sentences_per_doc, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::string> docs;
  docs.reserve(n_docs);
  for (int d = 0; d < n_docs; ++d) {
    std::ostringstream doc;
    for (int k = 0; k < sentences_per_doc; ++k) {
      SynthSentence s = synth_sentence(rng);
      for (size_t t = 0; t < s.tokens.size(); ++t) {
        if (t) doc << ' ';
        std::string word = s.tokens[t];
        if (t == 0) word[0] = char(std::toupper((unsigned char)word[0]));
        doc << word;
      }
      doc << ' ';
    }
    docs.push_back(doc.str());
  }
  return docs;
}

SynthEreData synth_ere(int n, uint64_t seed) {
  std::mt19937_64 rng(seed);
  SynthEreData data;
  data.labels.names = kSynthRelationNames;
  for (int k = 0; k < n; ++k) {
    SynthSentence s = synth_sentence(rng);
    EREExample ex;
    ex.example_id = "ere" + std::to_string(k);
    ex.passage = s.tokens;
    ex.i = s.v1_pos;
    ex.j = s.v2_pos;
    ex.relation = s.category;
    data.examples.push_back(std::move(ex));
  }
  return data;
}

std::vector<ExtractiveQAExample> synth_extractive_qa(int n_passages, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<ExtractiveQAExample> out;
  for (int k = 0; k < n_passages; ++k) {
    SynthSentence s = synth_sentence(rng);
    for (int which : {0, 1}) {
      ExtractiveQAExample ex;
      ex.example_id = "xqa" + std::to_string(k) + (which == 0 ? "a" : "b");
      ex.group_id = "g" + std::to_string(k);
      ex.passage = s.tokens;
      ex.question = {"which", "event", "happened", which == 0 ? "first" : "second", "?"};
      ex.answer_labels.assign(s.tokens.size(), 0);
      if (s.category == 0) {
        ex.answer_labels[which == 0 ? s.v1_pos : s.v2_pos] = 1;
      } else if (s.category == 1) {
        ex.answer_labels[which == 0 ? s.v2_pos : s.v1_pos] = 1;
      }
      // [during] passages keep the all-zero labels: nothing happened
      // strictly first or second.
      out.push_back(std::move(ex));
    }
  }
  return out;
}

std::vector<BinaryQAExample> synth_binary_qa(int n, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<BinaryQAExample> out;
  static const std::vector<std::string> kRelWords = {"before", "after", "while"};
  for (int k = 0; k < n; ++k) {
    SynthSentence s = synth_sentence(rng);
    BinaryQAExample ex;
    ex.example_id = "bqa" + std::to_string(k);
    ex.group_id = "g" + std::to_string(k);
    ex.passage = s.tokens;
    ex.question = {"what", "is", "the", "order", "of", "events", "?"};
    const int claimed = int(rng() % 3);
    // Candidate statement: "the <s1> <v1> <rel> the <s2> <v2>".
    const std::string& subject2 = s.tokens[s.category == 0 ? s.v2_pos - 1 : s.v2_pos - 2];
    ex.answer = {"the", s.tokens[1], s.tokens[s.v1_pos], kRelWords[claimed], "the", subject2,
                 s.tokens[s.v2_pos]};
    ex.label = claimed == s.category ? 1 : 0;
    out.push_back(std::move(ex));
  }
  return out;
}

}  // namespace econet

#pragma once

#include <random>
#include <set>
#include <string>
#include <vector>

namespace econet {

struct LabelSet {
  std::vector<std::string> names;
  std::set<int> negative;  // labels excluded from micro-F1 positives
  int size() const { return static_cast<int>(names.size()); }
  int id_of(const std::string& name) const;
};

// Event pair with its temporal relation: positions i and j index the
// two trigger tokens inside the passage.
struct EREExample {
  std::string example_id;
  std::vector<std::string> passage;
  int i = 0;
  int j = 0;
  int relation = 0;
};

// Per-passage-token 0/1 answer labels for a question over the passage.
struct ExtractiveQAExample {
  std::string example_id;
  std::string group_id;
  std::vector<std::string> passage;
  std::vector<std::string> question;
  std::vector<int> answer_labels;
};

// Candidate answer judged true/false for the question.
struct BinaryQAExample {
  std::string example_id;
  std::string group_id;
  std::vector<std::string> passage;
  std::vector<std::string> question;
  std::vector<std::string> answer;
  int label = 0;
};

}  // namespace econet

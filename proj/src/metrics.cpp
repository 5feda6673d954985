#include "econet/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace econet {

double token_set_f1(const std::set<int>& predicted, const std::set<int>& gold) {
  if (predicted.empty() && gold.empty()) return 1.0;
  if (predicted.empty() || gold.empty()) return 0.0;
  long overlap = 0;
  for (int t : predicted) overlap += gold.count(t);
  if (overlap == 0) return 0.0;
  const double p = double(overlap) / double(predicted.size());
  const double r = double(overlap) / double(gold.size());
  return 2.0 * p * r / (p + r);
}

int exact_match(const std::set<int>& predicted, const std::set<int>& gold) {
  return predicted == gold ? 1 : 0;
}

double macro_f1_questions(std::span<const std::set<int>> predicted, std::span<const std::set<int>> gold) {
  if (predicted.size() != gold.size()) throw std::invalid_argument("macro_f1: size mismatch");
  if (predicted.empty()) return 0.0;
  double sum = 0.0;
  for (size_t i = 0; i < predicted.size(); ++i) sum += token_set_f1(predicted[i], gold[i]);
  return sum / double(predicted.size());
}

double micro_f1(const std::vector<std::vector<long>>& confusion, const std::set<int>& negative_labels) {
  const int n = static_cast<int>(confusion.size());
  long tp = 0, fp = 0, fn = 0;
  for (int g = 0; g < n; ++g) {
    if ((int)confusion[g].size() != n) throw std::invalid_argument("micro_f1: confusion must be square");
    for (int p = 0; p < n; ++p) {
      const long count = confusion[g][p];
      if (g == p) {
        if (!negative_labels.count(g)) tp += count;
      } else {
        if (!negative_labels.count(p)) fp += count;
        if (!negative_labels.count(g)) fn += count;
      }
    }
  }
  if (tp == 0) return 0.0;
  const double precision = double(tp) / double(tp + fp);
  const double recall = double(tp) / double(tp + fn);
  return 2.0 * precision * recall / (precision + recall);
}

double micro_f1_from_pairs(std::span<const int> gold, std::span<const int> predicted, int n_labels,
                           const std::set<int>& negative_labels) {
  if (gold.size() != predicted.size()) throw std::invalid_argument("micro_f1: size mismatch");
  std::vector<std::vector<long>> confusion(n_labels, std::vector<long>(n_labels, 0));
  for (size_t i = 0; i < gold.size(); ++i) {
    if (gold[i] < 0 || gold[i] >= n_labels || predicted[i] < 0 || predicted[i] >= n_labels)
      throw std::out_of_range("micro_f1: label out of range");
    ++confusion[gold[i]][predicted[i]];
  }
  return micro_f1(confusion, negative_labels);
}

double consistency(std::span<const std::vector<int>> group_exact_matches) {
  if (group_exact_matches.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& group : group_exact_matches) {
    bool all = !group.empty();
    for (int em : group)
      if (em != 1) all = false;
    sum += all ? 1.0 : 0.0;
  }
  return sum / double(group_exact_matches.size());
}

double chi_square1_upper_tail(double statistic) {
  if (statistic < 0.0) throw std::invalid_argument("chi-square statistic must be non-negative");
  return std::erfc(std::sqrt(statistic / 2.0));
}

McNemarResult mcnemar(std::span<const int> correctness_a, std::span<const int> correctness_b) {
  if (correctness_a.size() != correctness_b.size())
    throw std::invalid_argument("mcnemar: vectors must cover the same sample set");
  McNemarResult result;
  for (size_t i = 0; i < correctness_a.size(); ++i) {
    if ((correctness_a[i] != 0 && correctness_a[i] != 1) || (correctness_b[i] != 0 && correctness_b[i] != 1))
      throw std::invalid_argument("mcnemar: correctness entries must be 0 or 1");
    if (correctness_a[i] == 1 && correctness_b[i] == 0) ++result.b;
    if (correctness_a[i] == 0 && correctness_b[i] == 1) ++result.c;
  }
  if (result.b + result.c == 0) {
    result.statistic = 0.0;
    result.p_value = 1.0;
    return result;
  }
  const double diff = std::abs(double(result.b - result.c)) - 1.0;
  result.statistic = diff * diff / double(result.b + result.c);
  result.p_value = chi_square1_upper_tail(result.statistic);
  return result;
}

}  // namespace econet

#pragma once

#include <set>
#include <span>
#include <vector>

namespace econet {

// Token/answer-set F1: 1.0 when both sets are empty, 0.0 when exactly
// one is.
double token_set_f1(const std::set<int>& predicted, const std::set<int>& gold);

int exact_match(const std::set<int>& predicted, const std::set<int>& gold);

// Mean of per-question set F1 scores.
double macro_f1_questions(std::span<const std::set<int>> predicted, std::span<const std::set<int>> gold);

// Micro-averaged F1 over non-negative relation labels. confusion is
// indexed [gold][predicted].
double micro_f1(const std::vector<std::vector<long>>& confusion, const std::set<int>& negative_labels);
double micro_f1_from_pairs(std::span<const int> gold, std::span<const int> predicted, int n_labels,
                           const std::set<int>& negative_labels);

// A group scores 1 iff every member has exact match = 1; returns the
// mean over groups.
double consistency(std::span<const std::vector<int>> group_exact_matches);

struct McNemarResult {
  long b = 0;  // a correct, b wrong
  long c = 0;  // a wrong, b correct
  double statistic = 0.0;
  double p_value = 1.0;
};

// Continuity-corrected McNemar test over paired 0/1 correctness
// vectors; p from the chi-square(1) upper tail. b + c = 0 gives p = 1.
McNemarResult mcnemar(std::span<const int> correctness_a, std::span<const int> correctness_b);

double chi_square1_upper_tail(double statistic);

}  // namespace econet

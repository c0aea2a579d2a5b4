#pragma once

#include "cwl/common.hpp"
#include "cwl/distribution.hpp"

#include <functional>
#include <optional>
#include <utility>
#include <vector>

namespace cwl {

enum class Classification { recurrent, transient };

const char* to_string(Classification c);

struct CriteriaReport {
  double delta = 0.0;
  // Q(-1) .. Q(L+1), where L is the window top of the excited law.
  std::vector<double> q_table;
  int q_table_base = -1;
  int c = 0;
  int ell = 0;
  double condition_lhs = 0.0;
  double condition_rhs = 0.0;
  bool satisfied = false;
  // The drift condition is strictly stronger than delta > 2.
  bool delta_above_two = false;
  Classification classification = Classification::recurrent;
};

double tail_q(const JumpDistribution& q, int j);
double mean_drift(const JumpDistribution& q);
double total_drift(const CookieEnvironment& env);

// Recurrent iff 0 <= delta <= 1. Throws std::domain_error for delta < 0.
Classification classify(double delta);

// lhs of the drift condition: 2 (1 - (c-1)/ell) Q(ell + c - 1) - 1.
double condition_lhs(const JumpDistribution& q, int c, int ell);

// Requires c >= 3 and ell >= 3c; satisfied means lhs > 2/c strictly.
CriteriaReport ballisticity_condition(const JumpDistribution& q, int c, int ell);

// First satisfying pair scanning c = 3..L, ell = 3c..L-c+1 (c outer).
std::optional<std::pair<int, int>> search_parameters(const JumpDistribution& q);

// Root of lhs(eps) = 2/c for a family eps -> q_eps with lhs decreasing in
// eps. Bisection to 1e-9; empty when there is no sign change on [0, 1].
std::optional<double> frontier_epsilon(int c, int ell,
                                       const std::function<JumpDistribution(double)>& family);

struct SweepRow {
  double eps = 0.0;
  double delta = 0.0;
  Classification classification = Classification::recurrent;
  double condition_lhs = 0.0;
  double condition_rhs = 0.0;
  bool satisfied = false;
};

std::vector<SweepRow> sweep_epsilon(int max_jump, int c, int ell, double eps_lo, double eps_hi,
                                    double eps_step);

} // namespace cwl

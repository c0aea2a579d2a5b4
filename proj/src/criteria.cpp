#include "cwl/criteria.hpp"

#include <cmath>
#include <stdexcept>

namespace cwl {

const char* to_string(Classification c) {
  return c == Classification::recurrent ? "recurrent" : "transient";
}

double tail_q(const JumpDistribution& q, int j) {
  return q.tail(j);
}

double mean_drift(const JumpDistribution& q) {
  return q.mean();
}

double total_drift(const CookieEnvironment& env) {
  double delta = 0.0;
  for (int i = 1; i <= env.cookies_per_vertex(); ++i) {
    delta += env.law(i).mean();
  }
  return delta;
}

Classification classify(double delta) {
  if (delta < 0.0) {
    throw std::domain_error("classify: negative total drift is outside the model");
  }
  return delta <= 1.0 ? Classification::recurrent : Classification::transient;
}

double condition_lhs(const JumpDistribution& q, int c, int ell) {
  const double shrink = 1.0 - static_cast<double>(c - 1) / static_cast<double>(ell);
  return 2.0 * shrink * q.tail(ell + c - 1) - 1.0;
}

CriteriaReport ballisticity_condition(const JumpDistribution& q, int c, int ell) {
  if (c < 3 || ell < 3 * c) {
    throw std::invalid_argument("ballisticity condition: need c >= 3 and ell >= 3c");
  }
  CriteriaReport report;
  report.delta = q.mean();
  report.c = c;
  report.ell = ell;
  report.condition_lhs = condition_lhs(q, c, ell);
  report.condition_rhs = 2.0 / static_cast<double>(c);
  report.satisfied = report.condition_lhs > report.condition_rhs;
  report.delta_above_two = report.delta > 2.0;
  report.classification = classify(report.delta);
  report.q_table_base = -1;
  const int top = q.window_hi();
  for (int j = -1; j <= top + 1; ++j) {
    report.q_table.push_back(q.tail(j));
  }
  return report;
}

std::optional<std::pair<int, int>> search_parameters(const JumpDistribution& q) {
  const int max_jump = q.support_hi();
  const double two = 2.0;
  for (int c = 3; c <= max_jump; ++c) {
    const int ell_hi = max_jump - c + 1;
    for (int ell = 3 * c; ell <= ell_hi; ++ell) {
      if (condition_lhs(q, c, ell) > two / static_cast<double>(c)) {
        return std::make_pair(c, ell);
      }
    }
  }
  return std::nullopt;
}

std::optional<double> frontier_epsilon(int c, int ell,
                                       const std::function<JumpDistribution(double)>& family) {
  if (c < 3 || ell < 3 * c) {
    throw std::invalid_argument("frontier: need c >= 3 and ell >= 3c");
  }
  const double rhs = 2.0 / static_cast<double>(c);
  const auto gap = [&](double eps) { return condition_lhs(family(eps), c, ell) - rhs; };
  double lo = 0.0;
  double hi = 1.0;
  if (gap(lo) <= 0.0 || gap(hi) >= 0.0) {
    return std::nullopt;
  }
  for (int iter = 0; iter < 100 && hi - lo > 1e-12; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (gap(mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

std::vector<SweepRow> sweep_epsilon(int max_jump, int c, int ell, double eps_lo, double eps_hi,
                                    double eps_step) {
  if (eps_step <= 0.0 || eps_hi < eps_lo) {
    throw std::invalid_argument("sweep: need eps_lo <= eps_hi and a positive step");
  }
  std::vector<SweepRow> rows;
  const i64 n = static_cast<i64>(std::floor((eps_hi - eps_lo) / eps_step + 1e-9));
  for (i64 i = 0; i <= n; ++i) {
    const double eps = eps_lo + eps_step * static_cast<double>(i);
    const JumpDistribution q = JumpDistribution::epsilon_family(max_jump, eps);
    SweepRow row;
    row.eps = eps;
    row.delta = q.mean();
    row.classification = classify(row.delta);
    row.condition_lhs = condition_lhs(q, c, ell);
    row.condition_rhs = 2.0 / static_cast<double>(c);
    row.satisfied = row.condition_lhs > row.condition_rhs;
    rows.push_back(row);
  }
  return rows;
}

} // namespace cwl

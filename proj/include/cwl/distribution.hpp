#pragma once

#include "cwl/common.hpp"

#include <map>
#include <string>
#include <vector>

namespace cwl {

// Finite jump law on an integer window. Probabilities are normalized at
// construction; zero-probability atoms are kept so the tail table stays
// aligned with the requested window. Stronger support requirements (two
// support points, skip-free left) are checked by the operations that need
// them, not here, so degenerate family endpoints stay representable.
class JumpDistribution {
public:
  explicit JumpDistribution(const std::map<int, double>& probs);

  // {-1: eps, max_jump: 1 - eps}
  static JumpDistribution epsilon_family(int max_jump, double eps);
  static JumpDistribution symmetric_coin();
  // {"support": [k...], "probs": [p...]}
  static JumpDistribution from_json_text(const std::string& text);

  int window_lo() const { return k_lo_; }
  int window_hi() const { return k_lo_ + static_cast<int>(probs_.size()) - 1; }
  int support_lo() const { return sup_lo_; }
  int support_hi() const { return sup_hi_; }
  std::size_t support_size() const { return support_size_; }
  bool skip_free_left() const { return sup_lo_ >= -1; }

  double prob(int k) const;
  // Q(j): probability of a jump of size at least j.
  double tail(int j) const;
  double mean() const { return mean_; }

  // Largest j with Q(j) >= u. A draw exactly on a tail value resolves to the
  // larger jump, which pins reproducibility on ties.
  int sample(double u) const;

  // Q(window_lo()) .. Q(window_hi()+1), non-increasing, last entry 0.
  const std::vector<double>& tails() const { return tails_; }

  std::string to_json_text() const;
  u64 hash() const;

private:
  int k_lo_ = 0;
  int sup_lo_ = 0;
  int sup_hi_ = 0;
  std::size_t support_size_ = 0;
  std::vector<double> probs_;
  std::vector<double> tails_;
  double mean_ = 0.0;
};

// C cookies per vertex with one excited law per remaining-cookie level.
// Vertices that are out of cookies step with the symmetric +-1 coin.
class CookieEnvironment {
public:
  explicit CookieEnvironment(std::vector<JumpDistribution> excited_laws);
  static CookieEnvironment single(JumpDistribution q);

  int cookies_per_vertex() const { return static_cast<int>(laws_.size()); }
  // 1-based: law(1) is used on the first visit.
  const JumpDistribution& law(int i) const;
  int max_jump() const;
  // All excited laws share one support set.
  bool common_support() const;
  u64 hash() const;

private:
  std::vector<JumpDistribution> laws_;
};

} // namespace cwl

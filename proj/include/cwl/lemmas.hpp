#pragma once

#include "cwl/common.hpp"
#include "cwl/distribution.hpp"
#include "cwl/rng.hpp"
#include "cwl/walk.hpp"

#include <cmath>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace cwl::lemmas {

// The +-1 coin every dominated process is measured against.
inline int coin(double u) { return u <= 0.5 ? +1 : -1; }

struct HypothesisViolation final : std::runtime_error {
  explicit HypothesisViolation(const std::string& what_) : std::runtime_error(what_) {}
};

struct DominanceViolation final : std::runtime_error {
  DominanceViolation(u64 index_, i64 upper_, i64 lower_)
      : std::runtime_error("strassen pair: upper " + std::to_string(upper_) + " below lower " +
                           std::to_string(lower_) + " at index " + std::to_string(index_)),
        index(index_) {}
  u64 index;
};

struct CoinProcess {
  i64 position = 0;
  explicit CoinProcess(i64 start = 0) : position(start) {}
  i64 step(double u) {
    const i64 inc = coin(u);
    position += inc;
    return inc;
  }
};

// Cookie-walk increments with a private visit history; dominates the coin
// whenever Q(1) >= 1/2 for every excited law.
class ExcitedProcess {
public:
  ExcitedProcess(const CookieEnvironment* env, i64 start) : env_(env) {
    state_.position = start;
    state_.visits = {{start, 1}};
    state_.running_max = state_.running_min = start;
  }
  i64 position = 0;
  i64 step(double u) {
    const i64 before = state_.position;
    cwl::step(state_, *env_, u);
    position = state_.position;
    return state_.position - before;
  }

private:
  const CookieEnvironment* env_;
  WalkState state_;
};

struct ExitTimeReport {
  double mean_t = 0.0;
  double se_t = 0.0;
  double mean_t2 = 0.0;
  double se_t2 = 0.0;
  double second_moment_bound = 0.0;  // (b - a) * 2^(2(b-a)+1)
  u64 replicas = 0;
  u64 censored = 0;
  bool bound_ok = false;
  u64 block_bound_violations = 0;  // exit time above G * (b - a)
};

struct BlockBound {
  i64 exit_time = 0;
  i64 g = 0;
  bool found_g = true;
  bool holds = true;
};

// Pathwise: the first run of (b - a) consecutive uniforms below 1/2 pushes
// any coin-dominating process out of (a, b), so T <= G (b - a) exactly when
// both are driven by the same stream.
BlockBound geometric_block_bound(u64 seed, u64 stream, i64 a, i64 b, i64 start, i64 horizon);

// Mean and second moment of the exit time of (a, b), with the per-step
// domination hypothesis checked against the shared uniform (a violating
// process throws) and the geometric block bound asserted per path.
template <class MakeProcess>
ExitTimeReport exit_time_moments(MakeProcess&& make_process, i64 a, i64 b, i64 start,
                                 u64 replicas, u64 seed, i64 step_cap = 4'000'000) {
  if (a >= b) {
    throw std::invalid_argument("exit_time_moments: need a < b");
  }
  ExitTimeReport report;
  const double width = static_cast<double>(b - a);
  report.second_moment_bound = width * std::pow(2.0, 2.0 * width + 1.0);
  double sum_t = 0.0, sum_t2 = 0.0, sum_t2sq = 0.0, sum_tsq = 0.0;
  u64 n = 0;
  for (u64 r = 0; r < replicas; ++r) {
    UniformSource uniforms(seed, r);
    auto process = make_process(r);
    i64 pos = start;
    i64 exit_time = -1;
    if (pos <= a || pos >= b) {
      exit_time = 0;
    } else {
      for (i64 t = 0; t < step_cap; ++t) {
        const double u = uniforms.at(static_cast<u64>(t));
        const i64 inc = process.step(u);
        if (inc < coin(u)) {
          throw HypothesisViolation(
              "exit_time_moments: increment fell below the shared-uniform coin at step " +
              std::to_string(t));
        }
        pos += inc;
        if (pos <= a || pos >= b) {
          exit_time = t + 1;
          break;
        }
      }
    }
    if (exit_time < 0) {
      ++report.censored;
      continue;
    }
    const BlockBound block = geometric_block_bound(seed, r, a, b, start, step_cap);
    if (block.found_g && exit_time > block.g * (b - a)) {
      ++report.block_bound_violations;
    }
    const double t = static_cast<double>(exit_time);
    sum_t += t;
    sum_tsq += t * t;
    sum_t2 += t * t;
    sum_t2sq += t * t * t * t;
    ++n;
  }
  report.replicas = n;
  if (n > 0) {
    report.mean_t = sum_t / static_cast<double>(n);
    report.mean_t2 = sum_t2 / static_cast<double>(n);
    if (n > 1) {
      const double var_t =
          (sum_tsq - sum_t * sum_t / static_cast<double>(n)) / static_cast<double>(n - 1);
      const double var_t2 =
          (sum_t2sq - sum_t2 * sum_t2 / static_cast<double>(n)) / static_cast<double>(n - 1);
      report.se_t = std::sqrt(std::max(0.0, var_t) / static_cast<double>(n));
      report.se_t2 = std::sqrt(std::max(0.0, var_t2) / static_cast<double>(n));
    }
    report.bound_ok = report.mean_t2 <= report.second_moment_bound + 3.0 * report.se_t2;
  }
  return report;
}

struct SlopeReport {
  double slope = 0.0;
  double limit = 0.0;  // K + 3 K / sqrt(n)
  bool pass = false;
  u64 n = 0;
  u64 batch_warnings = 0;
  double max_batch_m2 = 0.0;
};

// Partial-sum slope of an adapted sequence with declared conditional second
// moment at most K^2; batches are spot-checked against the declaration.
SlopeReport martingale_lln_check(const std::function<double()>& xi, double k_bound, u64 n_max,
                                 u64 batch = 1000);

struct DiscreteLaw {
  std::vector<i64> values;  // ascending
  std::vector<double> cdf;  // same length, last entry 1

  i64 quantile(double u) const;
  double cdf_at(i64 x) const;
  static DiscreteLaw from_jump(const JumpDistribution& q);
  static DiscreteLaw shifted(const DiscreteLaw& law, i64 offset);
};

struct StrassenPair {
  std::vector<i64> upper;  // distributed like the sampled sequence
  std::vector<i64> lower;  // independent draws from the given laws
};

// Inverse-CDF coupling on one shared uniform per index: when every declared
// conditional law sits above g_law(n), upper[n] >= lower[n] pathwise. A
// declaration error surfaces as DominanceViolation at the failing index.
StrassenPair strassen_pair(
    const std::function<DiscreteLaw(u64)>& g_law,
    const std::function<DiscreteLaw(u64, std::span<const i64>)>& conditional_law, u64 seed,
    u64 n);

double ks_distance(std::span<const i64> sample, const DiscreteLaw& law);

} // namespace cwl::lemmas

#pragma once

#include "cwl/common.hpp"
#include "cwl/exec.hpp"
#include "cwl/walk.hpp"

#include <optional>
#include <span>
#include <vector>

namespace cwl {

// A maximal forward jump from a strict running maximum that the walk never
// falls back below. Consecutive cut times renew the path.
struct CutTimeRecord {
  i64 tau = 0;       // time of the jump
  i64 position = 0;  // Y_tau
};

enum class SpeedMethod { renewal, naive };

struct SpeedEstimate {
  double point = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  i64 n_renewals = 0;
  SpeedMethod method = SpeedMethod::naive;
};

// 10 L^2 / max(delta - 1, 0.1): the no-return window a record must survive
// before it is trusted on a finite path.
i64 default_guard(const CookieEnvironment& env);

// All t with increment exactly max_jump, Y_t a strict running maximum, and
// no later position below Y_t + max_jump. Records within `guard` steps of
// the horizon are dropped as censored.
std::vector<CutTimeRecord> detect_cut_times(const Trajectory& traj, int max_jump, i64 guard);

// Ratio of mean gaps over records 2..n (the leading record has a different
// law). Needs at least 3 records; the interval is a delta-method ratio CI.
std::optional<SpeedEstimate> estimate_speed_renewal(std::span<const CutTimeRecord> records,
                                                    double level = 0.99);

SpeedEstimate estimate_speed_naive(const Trajectory& traj);

struct AlphaEstimate {
  double point = 0.0;
  double se = 0.0;
  u64 replicas = 0;
  i64 horizon = 0;
};

// Fraction of replicas whose path never goes below 0 up to the horizon; an
// upper-bounding estimate that decreases as the horizon grows.
AlphaEstimate estimate_alpha(const CookieEnvironment& env, u64 replicas, i64 horizon, u64 seed,
                             ExecMode mode = ExecMode::openmp);

// Number of width-`block_len` blocks [j*len, (j+1)*len - 1], j >= 0, that the
// walk has moved past (max position >= (j+1)*len) and occupied exactly once.
i64 exactly_once_blocks(const Trajectory& traj, int block_len);

} // namespace cwl

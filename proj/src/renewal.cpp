#include "cwl/renewal.hpp"

#include "cwl/criteria.hpp"
#include "cwl/rng.hpp"
#include "cwl/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace cwl {

i64 default_guard(const CookieEnvironment& env) {
  const double L = static_cast<double>(env.max_jump());
  const double delta = total_drift(env);
  const double g = 10.0 * L * L / std::max(delta - 1.0, 0.1);
  return std::max<i64>(1, static_cast<i64>(std::ceil(g)));
}

std::vector<CutTimeRecord> detect_cut_times(const Trajectory& traj, int max_jump, i64 guard) {
  if (guard < 1) {
    throw std::invalid_argument("detect_cut_times: guard must be >= 1");
  }
  const auto& y = traj.positions;
  const i64 horizon = traj.horizon();
  std::vector<CutTimeRecord> records;
  if (horizon < 1) {
    return records;
  }
  // suffix_min[s] = min of y[s..horizon]
  std::vector<i64> suffix_min(y.size());
  suffix_min.back() = y.back();
  for (std::size_t s = y.size() - 1; s-- > 0;) {
    suffix_min[s] = std::min(y[s], suffix_min[s + 1]);
  }
  bool have_max = false;
  i64 max_before = 0;  // max of y[0..t-1]
  for (i64 t = 0; t < horizon; ++t) {
    const i64 yt = y[static_cast<std::size_t>(t)];
    const bool strict_max = !have_max || yt > max_before;
    if (strict_max && y[static_cast<std::size_t>(t + 1)] - yt == max_jump &&
        suffix_min[static_cast<std::size_t>(t + 1)] >= yt + max_jump &&
        t + guard <= horizon) {
      records.push_back({t, yt});
    }
    if (!have_max || yt > max_before) {
      max_before = yt;
      have_max = true;
    }
  }
  return records;
}

std::optional<SpeedEstimate> estimate_speed_renewal(std::span<const CutTimeRecord> records,
                                                    double level) {
  if (records.size() < 3) {
    return std::nullopt;
  }
  // Gaps between records 2..n; the gap out of record 1 is skipped with it.
  std::vector<double> dj, dt;
  for (std::size_t k = 2; k < records.size(); ++k) {
    dj.push_back(static_cast<double>(records[k].position - records[k - 1].position));
    dt.push_back(static_cast<double>(records[k].tau - records[k - 1].tau));
  }
  const std::size_t m = dj.size();
  const double mean_j = mean_of(dj);
  const double mean_t = mean_of(dt);
  const double ratio = mean_j / mean_t;

  double var_j = 0.0, var_t = 0.0, cov = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    var_j += (dj[i] - mean_j) * (dj[i] - mean_j);
    var_t += (dt[i] - mean_t) * (dt[i] - mean_t);
    cov += (dj[i] - mean_j) * (dt[i] - mean_t);
  }
  double half = 0.0;
  if (m > 1) {
    var_j /= static_cast<double>(m - 1);
    var_t /= static_cast<double>(m - 1);
    cov /= static_cast<double>(m - 1);
    const double var_ratio =
        (var_j - 2.0 * ratio * cov + ratio * ratio * var_t) /
        (mean_t * mean_t * static_cast<double>(m));
    half = normal_quantile_two_sided(level) * std::sqrt(std::max(0.0, var_ratio));
  }
  SpeedEstimate est;
  est.point = ratio;
  est.ci_low = ratio - half;
  est.ci_high = ratio + half;
  est.n_renewals = static_cast<i64>(records.size());
  est.method = SpeedMethod::renewal;
  return est;
}

SpeedEstimate estimate_speed_naive(const Trajectory& traj) {
  const i64 horizon = traj.horizon();
  if (horizon < 1) {
    throw std::invalid_argument("estimate_speed_naive: horizon must be >= 1");
  }
  SpeedEstimate est;
  est.point = static_cast<double>(traj.positions.back()) / static_cast<double>(horizon);
  est.ci_low = est.point;
  est.ci_high = est.point;
  est.n_renewals = 0;
  est.method = SpeedMethod::naive;
  return est;
}

AlphaEstimate estimate_alpha(const CookieEnvironment& env, u64 replicas, i64 horizon, u64 seed,
                             ExecMode mode) {
  std::vector<unsigned char> stays_nonneg(replicas, 0);
  const auto body = [&](u64 r) {
    UniformSource uniforms(seed, r);
    WalkState state;
    bool ok = true;
    for (i64 t = 0; t < horizon; ++t) {
      step(state, env, uniforms.next());
      if (state.position < 0) {
        ok = false;
        break;
      }
    }
    stays_nonneg[r] = ok ? 1 : 0;
  };
  if (mode == ExecMode::openmp) {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (i64 r = 0; r < static_cast<i64>(replicas); ++r) {
      body(static_cast<u64>(r));
    }
  } else {
    for (u64 r = 0; r < replicas; ++r) {
      body(r);
    }
  }
  u64 hits = 0;
  for (unsigned char b : stays_nonneg) {
    hits += b;
  }
  AlphaEstimate out;
  out.replicas = replicas;
  out.horizon = horizon;
  out.point = replicas ? static_cast<double>(hits) / static_cast<double>(replicas) : 0.0;
  out.se = replicas ? std::sqrt(out.point * (1.0 - out.point) / static_cast<double>(replicas))
                    : 0.0;
  return out;
}

i64 exactly_once_blocks(const Trajectory& traj, int block_len) {
  if (block_len < 1) {
    throw std::invalid_argument("exactly_once_blocks: block length must be >= 1");
  }
  std::unordered_map<i64, i64> occupancy;
  i64 max_pos = traj.positions.front();
  for (i64 y : traj.positions) {
    max_pos = std::max(max_pos, y);
    if (y >= 0) {
      occupancy[y / block_len] += 1;
    }
  }
  i64 count = 0;
  for (const auto& [j, n] : occupancy) {
    const bool passed = max_pos >= (j + 1) * static_cast<i64>(block_len);
    if (passed && n == 1) {
      ++count;
    }
  }
  return count;
}

} // namespace cwl

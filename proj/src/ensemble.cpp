#include "cwl/ensemble.hpp"

#include "cwl/rng.hpp"
#include "cwl/stats.hpp"

#include <algorithm>
#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace cwl {

int hardware_width() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

namespace {

template <class Body>
void for_each_replica(u64 replicas, ExecMode mode, Body&& body) {
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
}

} // namespace

SpeedEnsemble run_speed_ensemble(const CookieEnvironment& env, const SpeedRunConfig& cfg,
                                 ExecMode mode) {
  SpeedEnsemble out;
  out.level = cfg.level;
  out.guard = cfg.guard > 0 ? cfg.guard : default_guard(env);
  out.rows.resize(cfg.replicas);
  std::vector<std::string> errors(cfg.replicas);
  const int max_jump = env.max_jump();

  struct GapSums {
    double dj = 0.0;
    double dt = 0.0;
  };
  std::vector<GapSums> gaps(cfg.replicas);

  for_each_replica(cfg.replicas, mode, [&](u64 r) {
    try {
      const Trajectory traj = simulate(env, cfg.seed, cfg.horizon, r);
      ReplicaSpeed row;
      row.replica = r;
      row.naive = estimate_speed_naive(traj).point;
      row.final_position = traj.positions.back();
      row.min_position = *std::min_element(traj.positions.begin(), traj.positions.end());
      for (std::size_t t = 1; t < traj.positions.size(); ++t) {
        if (traj.positions[t] == 0) {
          ++row.origin_returns;
        }
      }
      const auto cuts = detect_cut_times(traj, max_jump, out.guard);
      row.n_renewals = static_cast<i64>(cuts.size());
      if (const auto est = estimate_speed_renewal(cuts, cfg.level)) {
        row.has_renewal = true;
        row.renewal = *est;
      }
      if (cuts.size() >= 3) {
        gaps[r].dj = static_cast<double>(cuts.back().position - cuts[1].position);
        gaps[r].dt = static_cast<double>(cuts.back().tau - cuts[1].tau);
      }
      out.rows[r] = row;
    } catch (const std::exception& e) {
      errors[r] = e.what();
    }
  });

  for (u64 r = 0; r < cfg.replicas; ++r) {
    if (!errors[r].empty()) {
      out.errors.push_back("replica " + std::to_string(r) + ": " + errors[r]);
    }
  }

  std::vector<double> naive;
  std::vector<double> renewal_points;
  double pooled_dj = 0.0, pooled_dt = 0.0;
  out.all_naive_positive = !out.rows.empty();
  for (const auto& row : out.rows) {
    naive.push_back(row.naive);
    if (row.naive <= 0.0) {
      out.all_naive_positive = false;
    }
    if (row.has_renewal) {
      renewal_points.push_back(row.renewal.point);
      ++out.replicas_with_renewal;
    }
    pooled_dj += gaps[row.replica].dj;
    pooled_dt += gaps[row.replica].dt;
  }
  out.naive_mean = mean_of(naive);
  out.naive_sd = sample_sd(naive);
  out.naive_se = naive.empty() ? 0.0 : out.naive_sd / std::sqrt(static_cast<double>(naive.size()));
  const double z = normal_quantile_two_sided(cfg.level);
  out.naive_ci_mean_lo = out.naive_mean - z * out.naive_se;
  out.naive_ci_mean_hi = out.naive_mean + z * out.naive_se;
  out.naive_pct_lo = empirical_quantile(naive, 0.5 * (1.0 - cfg.level));
  out.naive_pct_hi = empirical_quantile(naive, 1.0 - 0.5 * (1.0 - cfg.level));
  out.renewal_mean = mean_of(renewal_points);
  if (pooled_dt > 0.0) {
    out.renewal_pooled = pooled_dj / pooled_dt;
    out.has_renewal_pooled = true;
  }

  u64 nonneg = 0;
  for (const auto& row : out.rows) {
    if (row.min_position >= 0) {
      ++nonneg;
    }
  }
  if (!out.rows.empty()) {
    out.alpha_estimate = static_cast<double>(nonneg) / static_cast<double>(out.rows.size());
    out.alpha_se = std::sqrt(out.alpha_estimate * (1.0 - out.alpha_estimate) /
                             static_cast<double>(out.rows.size()));
  }
  return out;
}

namespace {

struct ReplicaCoupling {
  u64 completed = 0;
  u64 censored = 0;
  u64 cookie_n = 0, cookie_plus = 0, cookie_n_low = 0, cookie_plus_low = 0;
  u64 cookie_n_high = 0, cookie_plus_high = 0;
  u64 nc_n = 0, nc_plus = 0, nc_n_low = 0, nc_plus_low = 0, nc_n_high = 0, nc_plus_high = 0;
  u64 ordering_violations = 0;
  u64 intertwine_violations = 0;
  u64 h_increase_violations = 0;
  u64 first_entry_violations = 0;
  u64 no_cookie_low_k = 0;
  u64 dominance_failures = 0;
  u64 backward_skip_violations = 0;
  u64 sandwich_checked = 0;
  u64 sandwich_violations = 0;
  u64 literal_sigma_violations = 0;
  u64 same_block_pairs = 0;
  u64 same_block_n = 0;
  LandingStats landings;
  double h_slope = 0.0;
  std::string error;
  std::string counterexample;
};

} // namespace

CouplingEnsemble run_coupling_ensemble(const JumpDistribution& q, const MegaVertexConfig& cfg,
                                       const CouplingRunConfig& run, ExecMode mode) {
  std::vector<ReplicaCoupling> shards(run.replicas);
  const CookieEnvironment env = CookieEnvironment::single(q);
  const int c = cfg.c;

  for_each_replica(run.replicas, mode, [&](u64 r) {
    ReplicaCoupling& shard = shards[r];
    try {
      const Trajectory traj = simulate(env, run.seed, run.horizon, r);
      const TriggerScan scan = scan_triggers(traj, cfg);
      shard.completed = scan.completed;
      shard.censored = scan.censored;

      i64 prev_resolve = -1;
      i64 prev_enter = -1;
      bool first = true;
      for (const auto& rec : scan.records) {
        if (rec.censored) {
          continue;
        }
        if (first) {
          if (rec.block != 0 || rec.t_enter != 0) {
            ++shard.first_entry_violations;
          }
          first = false;
        }
        if (!(rec.t_enter <= rec.t_event && rec.t_event <= rec.t_resolve)) {
          ++shard.ordering_violations;
        }
        if (prev_resolve >= 0 && rec.t_enter < prev_resolve) {
          ++shard.intertwine_violations;
        }
        if (prev_enter >= 0 && rec.t_enter <= prev_enter) {
          ++shard.h_increase_violations;
        }
        prev_resolve = rec.t_resolve;
        prev_enter = rec.t_enter;

        const bool plus = rec.arrow > 0;
        const bool low_k = rec.k <= c;
        if (rec.branch == TriggerBranch::cookie) {
          ++shard.cookie_n;
          shard.cookie_plus += plus;
          if (low_k) {
            ++shard.cookie_n_low;
            shard.cookie_plus_low += plus;
          } else {
            ++shard.cookie_n_high;
            shard.cookie_plus_high += plus;
          }
        } else {
          ++shard.nc_n;
          shard.nc_plus += plus;
          if (low_k) {
            ++shard.no_cookie_low_k;
            ++shard.nc_n_low;
            shard.nc_plus_low += plus;
          } else {
            ++shard.nc_n_high;
            shard.nc_plus_high += plus;
          }
        }
      }

      const CoupledBundle bundle = build_coupled_bundle(traj, cfg, scan);
      shard.backward_skip_violations = bundle.backward_skip_violations;
      if (!dominates_materialized(bundle.K, bundle.H) ||
          !dominates_materialized(bundle.H, bundle.E)) {
        ++shard.dominance_failures;
      }
      const SandwichReport sandwich = sandwich_check(bundle, traj, cfg);
      shard.sandwich_checked = sandwich.checked;
      shard.sandwich_violations = sandwich.violations;
      shard.literal_sigma_violations = sandwich.literal_sigma_violations;
      if (sandwich.violations > 0 && sandwich.first_violation) {
        const std::size_t n = *sandwich.first_violation;
        shard.counterexample = "replica " + std::to_string(r) + ": sandwich violated at block-change " +
                               std::to_string(n) + " (time " +
                               std::to_string(bundle.h_times[bundle.tau[n]]) + ", block " +
                               std::to_string(bundle.j_seq[n]) + ")";
      } else if (shard.dominance_failures > 0) {
        shard.counterexample = "replica " + std::to_string(r) + ": dominance chain K >= H >= E failed";
      }

      for (std::size_t n = 1; n < bundle.h_blocks.size(); ++n) {
        ++shard.same_block_n;
        if (bundle.h_blocks[n] == bundle.h_blocks[n - 1]) {
          ++shard.same_block_pairs;
        }
      }

      shard.landings = landing_stats(traj, cfg, q, scan);
      shard.h_slope = shard.landings.final_h_slope;
    } catch (const std::exception& e) {
      shard.error = e.what();
    }
  });

  CouplingEnsemble out;
  const MegaArrowLaw law = mega_arrow_law(q, cfg);
  out.cookie.bound = law.p_plus_cookie;
  out.no_cookie.bound = 0.5;
  double slope_sum = 0.0;
  u64 slope_n = 0;
  for (u64 r = 0; r < run.replicas; ++r) {
    const ReplicaCoupling& shard = shards[r];
    if (!shard.error.empty()) {
      out.errors.push_back("replica " + std::to_string(r) + ": " + shard.error);
      continue;
    }
    out.completed += shard.completed;
    out.censored += shard.censored;
    out.cookie.n += shard.cookie_n;
    out.cookie.plus += shard.cookie_plus;
    out.cookie.n_low_k += shard.cookie_n_low;
    out.cookie.plus_low_k += shard.cookie_plus_low;
    out.cookie.n_high_k += shard.cookie_n_high;
    out.cookie.plus_high_k += shard.cookie_plus_high;
    out.no_cookie.n += shard.nc_n;
    out.no_cookie.plus += shard.nc_plus;
    out.no_cookie.n_low_k += shard.nc_n_low;
    out.no_cookie.plus_low_k += shard.nc_plus_low;
    out.no_cookie.n_high_k += shard.nc_n_high;
    out.no_cookie.plus_high_k += shard.nc_plus_high;
    out.ordering_violations += shard.ordering_violations;
    out.intertwine_violations += shard.intertwine_violations;
    out.h_increase_violations += shard.h_increase_violations;
    out.first_entry_violations += shard.first_entry_violations;
    out.no_cookie_low_k += shard.no_cookie_low_k;
    out.dominance_failures += shard.dominance_failures;
    out.backward_skip_violations += shard.backward_skip_violations;
    out.sandwich_checked += shard.sandwich_checked;
    out.sandwich_violations += shard.sandwich_violations;
    out.literal_sigma_violations += shard.literal_sigma_violations;
    out.same_block_pairs += shard.same_block_pairs;
    out.same_block_n += shard.same_block_n;
    out.landings.landings += shard.landings.landings;
    out.landings.successes += shard.landings.successes;
    out.landings.unresolved += shard.landings.unresolved;
    out.landings.h_spacing_violations += shard.landings.h_spacing_violations;
    out.landings.kappa = shard.landings.kappa;
    slope_sum += shard.h_slope;
    ++slope_n;
    if (!shard.counterexample.empty() && out.counterexamples.size() < 8) {
      out.counterexamples.push_back(shard.counterexample);
    }
  }

  const auto finish_branch = [](BranchStat& stat) {
    if (stat.n > 0) {
      stat.frac = static_cast<double>(stat.plus) / static_cast<double>(stat.n);
      stat.se = std::sqrt(stat.frac * (1.0 - stat.frac) / static_cast<double>(stat.n));
      stat.pass = stat.frac >= stat.bound - 3.0 * stat.se;
    }
  };
  finish_branch(out.cookie);
  finish_branch(out.no_cookie);

  if (out.same_block_n > 0) {
    out.same_block_frac =
        static_cast<double>(out.same_block_pairs) / static_cast<double>(out.same_block_n);
    const double se = std::sqrt(out.same_block_frac * (1.0 - out.same_block_frac) /
                                static_cast<double>(out.same_block_n));
    out.same_block_limit = 0.5 + 3.0 * se;
    out.same_block_pass = out.same_block_frac <= out.same_block_limit;
  }
  if (out.landings.landings > 0) {
    out.landings.success_rate = static_cast<double>(out.landings.successes) /
                                static_cast<double>(out.landings.landings);
  }
  out.mean_h_slope = slope_n ? slope_sum / static_cast<double>(slope_n) : 0.0;
  return out;
}

MWalkEnsemble run_mwalk_ensemble(const MegaArrowLaw& law, const MWalkRunConfig& cfg,
                                 ExecMode mode) {
  MWalkEnsemble out;
  out.level = cfg.level;
  out.speeds.assign(cfg.replicas, 0.0);

  const auto body = [&](u64 r) {
    // Visit counts clipped at c+1: the arrow law only depends on whether the
    // stack index is at most c, and each arrow is consumed exactly once, so
    // a fresh sequential uniform per step realizes the independent law.
    const i64 horizon = cfg.horizon;
    std::vector<std::uint8_t> counts(static_cast<std::size_t>(2 * horizon + 1), 0);
    const i64 offset = horizon;
    UniformSource uniforms(cfg.seed, r);
    i64 pos = 0;
    const std::uint8_t clip = static_cast<std::uint8_t>(law.c + 1);
    counts[static_cast<std::size_t>(offset)] = 1;
    for (i64 t = 0; t < horizon; ++t) {
      std::uint8_t& m = counts[static_cast<std::size_t>(pos + offset)];
      const double p = m <= static_cast<std::uint8_t>(law.c) ? law.p_plus_cookie : law.p_plus_rest;
      const double u = uniforms.next();
      pos += u > 1.0 - p ? +1 : -1;
      std::uint8_t& next = counts[static_cast<std::size_t>(pos + offset)];
      if (next < clip) {
        ++next;
      }
    }
    out.speeds[r] = static_cast<double>(pos) / static_cast<double>(horizon);
  };
  for_each_replica(cfg.replicas, mode, body);

  out.mean = mean_of(out.speeds);
  out.sd = sample_sd(out.speeds);
  out.se = out.speeds.empty() ? 0.0 : out.sd / std::sqrt(static_cast<double>(out.speeds.size()));
  const double z = normal_quantile_two_sided(cfg.level);
  out.ci_lo = out.mean - z * out.se;
  out.ci_hi = out.mean + z * out.se;
  for (double v : out.speeds) {
    if (v > 0.0) {
      ++out.positive;
    }
  }
  return out;
}

} // namespace cwl

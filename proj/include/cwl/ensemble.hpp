#pragma once

#include "cwl/common.hpp"
#include "cwl/coupling.hpp"
#include "cwl/exec.hpp"
#include "cwl/renewal.hpp"

#include <string>
#include <vector>

namespace cwl {

// Replica-level kernels. One trajectory is inherently sequential, so the
// parallel axis is always the replica index; each replica owns the stream
// (seed, replica) and results merge in replica order, which makes the
// OpenMP path bit-identical to the serial reference.

struct ReplicaSpeed {
  u64 replica = 0;
  double naive = 0.0;
  bool has_renewal = false;
  SpeedEstimate renewal{};
  i64 n_renewals = 0;
  i64 final_position = 0;
  i64 min_position = 0;
  i64 origin_returns = 0;
};

struct SpeedRunConfig {
  u64 replicas = 0;
  i64 horizon = 0;
  u64 seed = 0;
  i64 guard = 0;  // <= 0 means the environment default
  double level = 0.99;
};

struct SpeedEnsemble {
  std::vector<ReplicaSpeed> rows;
  double naive_mean = 0.0;
  double naive_sd = 0.0;
  double naive_se = 0.0;
  double naive_ci_mean_lo = 0.0;  // mean +- z * se
  double naive_ci_mean_hi = 0.0;
  double naive_pct_lo = 0.0;  // replica-spread percentile interval
  double naive_pct_hi = 0.0;
  bool all_naive_positive = false;
  u64 replicas_with_renewal = 0;
  double renewal_mean = 0.0;    // mean of per-replica renewal points
  double renewal_pooled = 0.0;  // pooled gap sums across replicas
  bool has_renewal_pooled = false;
  double alpha_estimate = 0.0;  // fraction of paths that never went below 0
  double alpha_se = 0.0;
  double level = 0.99;
  i64 guard = 0;
  std::vector<std::string> errors;
};

SpeedEnsemble run_speed_ensemble(const CookieEnvironment& env, const SpeedRunConfig& cfg,
                                 ExecMode mode);

struct BranchStat {
  u64 n = 0;
  u64 plus = 0;
  double frac = 0.0;
  double se = 0.0;
  double bound = 0.0;
  bool pass = true;
  // Stratified by stack index, mirroring the independent-law split.
  u64 n_low_k = 0;
  u64 plus_low_k = 0;
  u64 n_high_k = 0;
  u64 plus_high_k = 0;
};

struct CouplingRunConfig {
  u64 replicas = 0;
  i64 horizon = 0;
  u64 seed = 0;
};

struct CouplingEnsemble {
  u64 completed = 0;
  u64 censored = 0;
  BranchStat cookie;
  BranchStat no_cookie;
  u64 ordering_violations = 0;    // per record: enter <= event <= resolve
  u64 intertwine_violations = 0;  // resolve after the next first trigger
  u64 h_increase_violations = 0;  // first-trigger times not strictly increasing
  u64 first_entry_violations = 0; // first trigger not at block 0, time 0
  u64 no_cookie_low_k = 0;        // no-cookie sequences before stack index c+1
  u64 dominance_failures = 0;     // replicas where K >= H >= E fails
  u64 backward_skip_violations = 0;
  u64 sandwich_checked = 0;
  u64 sandwich_violations = 0;
  u64 literal_sigma_violations = 0;
  u64 same_block_pairs = 0;  // consecutive block-times in one block
  u64 same_block_n = 0;
  double same_block_frac = 0.0;
  double same_block_limit = 0.0;  // 1/2 + 3 SE
  bool same_block_pass = true;
  LandingStats landings;
  double mean_h_slope = 0.0;
  std::vector<std::string> errors;
  std::vector<std::string> counterexamples;  // first few pathwise failures, if any

  bool structural_ok() const {
    return ordering_violations == 0 && intertwine_violations == 0 &&
           h_increase_violations == 0 && first_entry_violations == 0 &&
           no_cookie_low_k == 0 && dominance_failures == 0 && backward_skip_violations == 0 &&
           sandwich_violations == 0 && landings.h_spacing_violations == 0 && errors.empty();
  }
};

CouplingEnsemble run_coupling_ensemble(const JumpDistribution& q, const MegaVertexConfig& cfg,
                                       const CouplingRunConfig& run, ExecMode mode);

struct MWalkRunConfig {
  u64 replicas = 0;
  i64 horizon = 0;
  u64 seed = 0;
  double level = 0.99;
};

struct MWalkEnsemble {
  std::vector<double> speeds;
  double mean = 0.0;
  double sd = 0.0;
  double se = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  u64 positive = 0;
  double level = 0.99;
};

// Streaming nearest-neighbour c-cookie walk generated by the independent
// arrow law; no trajectory storage, so long horizons stay cheap.
MWalkEnsemble run_mwalk_ensemble(const MegaArrowLaw& law, const MWalkRunConfig& cfg,
                                 ExecMode mode);

} // namespace cwl

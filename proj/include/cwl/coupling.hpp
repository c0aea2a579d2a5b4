#pragma once

#include "cwl/arrows.hpp"
#include "cwl/common.hpp"
#include "cwl/distribution.hpp"
#include "cwl/walk.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

namespace cwl {

// Mega vertices: B_j = [ell*j, ell*j + c - 1], one block of c sites every
// ell lattice units, for any j (negative blocks behave the same way).
struct MegaVertexConfig {
  int c;
  int ell;

  MegaVertexConfig(int c_, int ell_);

  i64 block_lo(i64 j) const { return static_cast<i64>(ell) * j; }
  i64 block_hi(i64 j) const { return block_lo(j) + c - 1; }
  std::optional<i64> block_of(i64 y) const;
  // h with y in [ell*(h-1)+c, ell*h+c-1]; these tiles partition the line.
  i64 tile_of(i64 y) const;
};

enum class TriggerBranch : std::uint8_t { cookie, no_cookie };

enum class TriggerSubcase : std::uint8_t {
  hit_cookie_at_entry,    // fresh block vertex at the first trigger
  hit_cookie_later,       // fresh block vertex after the first trigger
  exited_left,            // left the watch window below the block side
  exited_without_cookie,  // left the final window above without a fresh hit
  pending,                // censored before the third trigger
};

const char* to_string(TriggerBranch b);
const char* to_string(TriggerSubcase s);

// One three-stage stopping sequence for block j. The branch is fixed by the
// block's remaining cookies when the previous sequence resolved.
struct TriggerRecord {
  i64 block = 0;
  i64 k = 0;          // per-block sequence number, starting at 1
  i64 t_enter = -1;   // first trigger
  i64 t_event = -1;   // second trigger
  i64 t_resolve = -1; // third trigger, -1 while censored
  TriggerBranch branch = TriggerBranch::cookie;
  TriggerSubcase subcase = TriggerSubcase::pending;
  // Cookie branch only: whether block j+1 still had cookies at the second
  // trigger; selects the final watch window and the +1 threshold.
  std::optional<bool> neighbor_has_cookies;
  std::int8_t arrow = 0;  // +1 / -1, 0 when censored
  bool censored = false;
};

// Cookies remaining in B_j right before time t: c minus the distinct block
// vertices occupied at times < t.
int mega_cookie_count(const Trajectory& traj, const MegaVertexConfig& cfg, i64 j, i64 t);

struct TriggerScan {
  std::vector<TriggerRecord> records;  // sorted by t_enter
  ArrowSystem arrows;                  // one arrow per completed record
  u64 completed = 0;
  u64 censored = 0;
};

// Single forward pass over the trajectory running one lazy state machine per
// touched block; O(horizon) work in total.
TriggerScan scan_triggers(const Trajectory& traj, const MegaVertexConfig& cfg);

std::vector<TriggerRecord> scan_triggers_for_block(const Trajectory& traj,
                                                   const MegaVertexConfig& cfg, i64 j);

// Re-derives the arrow of a completed record from the resolve position.
// Throws std::invalid_argument on censored records.
std::int8_t assign_arrow(const TriggerRecord& record, const Trajectory& traj,
                         const MegaVertexConfig& cfg);

// Block-transition systems built from the ordered first-trigger times.
struct CoupledBundle {
  ArrowSystem E;  // per-sequence arrows
  ArrowSystem H;  // one arrow per block transition
  ArrowSystem K;  // H with one +1 per unit block crossed forward
  std::vector<i64> h_times;       // completed first-trigger times, increasing
  std::vector<i64> h_blocks;      // block of the walk at each h_time
  std::vector<std::size_t> tau;   // indices into h_times where the block changes
  std::vector<i64> j_seq;         // block at each tau point, j_seq[0] first
  std::vector<i64> sigma_cum;     // cumulative sum of |j_n - j_{n-1}|
  u64 backward_skip_violations = 0;  // leftward change of more than one block
};

CoupledBundle build_coupled_bundle(const Trajectory& traj, const MegaVertexConfig& cfg);
CoupledBundle build_coupled_bundle(const Trajectory& traj, const MegaVertexConfig& cfg,
                                   const TriggerScan& scan);

struct SandwichReport {
  u64 checked = 0;
  u64 violations = 0;
  std::optional<std::size_t> first_violation;
  // Diagnostic only: the same check with sigma taken per transition instead
  // of cumulatively.
  u64 literal_sigma_violations = 0;
};

// ell * X^K_{sigma_n} <= Y at the n-th block-change time <= ell * X^K_{sigma_n} + c - 1,
// with sigma read cumulatively.
SandwichReport sandwich_check(const CoupledBundle& bundle, const Trajectory& traj,
                              const MegaVertexConfig& cfg);

// Independent arrow law: P(+1) = (1 - (c-1)/ell) Q(ell+c-1) on the first c
// stack slots, 1/2 beyond. The generated walk is a nearest-neighbour
// c-cookie walk with total drift c * (1 - 2 eps').
struct MegaArrowLaw {
  double p_plus_cookie = 0.5;
  double p_plus_rest = 0.5;
  int c = 3;

  double epsilon_prime() const { return 1.0 - p_plus_cookie; }
  double delta_star() const { return c * (1.0 - 2.0 * epsilon_prime()); }
  double p_plus(i64 k) const { return k <= c ? p_plus_cookie : p_plus_rest; }
};

MegaArrowLaw mega_arrow_law(const JumpDistribution& q, const MegaVertexConfig& cfg);

// Arrow keyed by (j, k): +1 iff the shared uniform exceeds 1 - P(+1).
std::int8_t independent_arrow_at(const MegaArrowLaw& law, u64 seed, i64 j, i64 k);
ArrowSystem build_m_system(const MegaArrowLaw& law, u64 seed, i64 j_lo, i64 j_hi, i64 depth);

struct BoundViolation final : std::runtime_error {
  BoundViolation(i64 j_, i64 k_, double declared_, double bound_);
  i64 j;
  i64 k;
  double declared;
  double bound;
};

struct StrassenBundle {
  ArrowSystem upper;  // sampled system
  ArrowSystem lower;  // independent bound-law system
  u64 indices = 0;
  u64 equal = 0;
  u64 dominance_violations = 0;
};

// Shares one uniform per index between the sampled system and the bound law,
// so lower(j,k) <= upper(j,k) holds pathwise whenever the sampler's declared
// conditional P(+1) stays at or above the bound. A sampler that dips below
// the bound raises BoundViolation at that index.
StrassenBundle strassen_bundle(
    const MegaArrowLaw& bound,
    const std::function<double(i64 j, i64 k, const ArrowSystem& upper_so_far)>& sampler,
    u64 seed, i64 j_lo, i64 j_hi, i64 depth);

struct LandingStats {
  u64 landings = 0;
  u64 successes = 0;
  u64 unresolved = 0;
  double success_rate = 0.0;
  double kappa = 0.0;  // q(-1)^(ell-c) lower bound
  double final_h_slope = 0.0;
  u64 h_spacing_violations = 0;  // first-trigger times not strictly increasing
};

// Classifies the tile entered at each resolve time: a success reaches the
// tile's left edge or its block's cookie side before crossing past it.
LandingStats landing_stats(const Trajectory& traj, const MegaVertexConfig& cfg,
                           const JumpDistribution& q);
LandingStats landing_stats(const Trajectory& traj, const MegaVertexConfig& cfg,
                           const JumpDistribution& q, const TriggerScan& scan);

} // namespace cwl

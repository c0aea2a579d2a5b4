#pragma once

#include "cwl/common.hpp"
#include "cwl/distribution.hpp"

#include <set>
#include <string>
#include <unordered_map>
#include <vector>

namespace cwl {

// Occupation counts include the arrival at the current position, so the
// counts sum to time + 1 and the cookies left at v are max(C - visits[v], 0).
struct WalkState {
  i64 position = 0;
  i64 time = 0;
  std::unordered_map<i64, std::uint32_t> visits{{0, 1}};
  i64 running_max = 0;
  i64 running_min = 0;
};

// One transition. A vertex occupied p times before now steps with law
// q_{p+1} while p < C; out of cookies it moves +1 when u < 1/2, else -1.
void step(WalkState& state, const CookieEnvironment& env, double u);

struct Trajectory {
  std::vector<i64> positions;
  u64 seed = 0;
  u64 stream = 0;
  u64 env_hash = 0;

  i64 horizon() const { return static_cast<i64>(positions.size()) - 1; }
};

// Deterministic in (env, seed, stream, horizon). Skip-free-left paths are
// checked on the fly: a forward jump back into the range must land on a
// fully visited interval.
Trajectory simulate(const CookieEnvironment& env, u64 seed, i64 horizon, u64 stream = 0);

// Distinct vertices occupied up to time t. Throws std::out_of_range.
std::set<i64> range_at(const Trajectory& traj, i64 t);

// Text record: seed, stream, env hash, horizon, delta-encoded increments.
std::string serialize(const Trajectory& traj);
Trajectory deserialize(const std::string& text);

} // namespace cwl

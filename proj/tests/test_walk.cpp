#include "cwl/walk.hpp"

#include "cwl/rng.hpp"

#include "doctest.h"

#include <stdexcept>

#include <cmath>
#include <map>
#include <unordered_set>

using namespace cwl;

TEST_SUITE("walk") {

TEST_CASE("step: excited at a fresh vertex, coin after the cookie is gone") {
  const CookieEnvironment env = CookieEnvironment::single(JumpDistribution({{15, 1.0}}));
  WalkState state;
  step(state, env, 0.77);
  CHECK(state.position == 15);
  CHECK(state.time == 1);

  // Vertex already occupied twice: the coin decides.
  WalkState coin_state;
  coin_state.visits[0] = 3;
  const CookieEnvironment eps_env =
      CookieEnvironment::single(JumpDistribution::epsilon_family(15, 0.01));
  step(coin_state, eps_env, 0.3);
  CHECK(coin_state.position == 1);
  WalkState coin_state2;
  coin_state2.visits[0] = 3;
  step(coin_state2, eps_env, 0.9);
  CHECK(coin_state2.position == -1);
}

TEST_CASE("step: multi-cookie ordering consumes laws first-in-first-out") {
  const CookieEnvironment env({JumpDistribution({{2, 1.0}}), JumpDistribution({{-1, 1.0}})});
  WalkState state;
  step(state, env, 0.5);  // fresh: first law
  CHECK(state.position == 2);
  state.position = 0;  // march back to the same vertex by hand
  state.visits[0] = 2;
  step(state, env, 0.5);  // second visit: second law
  CHECK(state.position == -1);
}

TEST_CASE("walk state bookkeeping: occupations sum to time + 1") {
  const CookieEnvironment env =
      CookieEnvironment::single(JumpDistribution::epsilon_family(3, 0.2));
  WalkState state;
  UniformSource uniforms(7, 0);
  for (int t = 0; t < 200; ++t) {
    step(state, env, uniforms.next());
  }
  i64 total = 0;
  for (const auto& [v, n] : state.visits) {
    total += n;
  }
  CHECK(total == state.time + 1);
  CHECK(state.running_max >= state.position);
  CHECK(state.running_min <= state.position);
}

TEST_CASE("simulate: deterministic monotone path when every jump is +1") {
  const CookieEnvironment env = CookieEnvironment::single(JumpDistribution({{1, 1.0}}));
  const Trajectory traj = simulate(env, 5, 10);
  REQUIRE(traj.positions.size() == 11);
  for (i64 t = 0; t <= 10; ++t) {
    CHECK(traj.positions[static_cast<std::size_t>(t)] == t);
  }
}

TEST_CASE("simulate: horizon zero gives the degenerate path") {
  const CookieEnvironment env = CookieEnvironment::single(JumpDistribution::symmetric_coin());
  const Trajectory traj = simulate(env, 5, 0);
  CHECK(traj.positions == std::vector<i64>{0});
}

TEST_CASE("simulate: identical inputs give byte-identical serialized output") {
  const CookieEnvironment env =
      CookieEnvironment::single(JumpDistribution::epsilon_family(15, 0.01));
  const Trajectory a = simulate(env, 99, 5000);
  const Trajectory b = simulate(env, 99, 5000);
  CHECK(serialize(a) == serialize(b));
  const Trajectory c = simulate(env, 100, 5000);
  CHECK(serialize(a) != serialize(c));
}

TEST_CASE("simulate matches the step-by-step recursion") {
  const CookieEnvironment env =
      CookieEnvironment::single(JumpDistribution::epsilon_family(4, 0.3));
  const Trajectory traj = simulate(env, 31, 500);
  WalkState state;
  UniformSource uniforms(31, 0);
  for (i64 t = 0; t < 500; ++t) {
    step(state, env, uniforms.next());
    CHECK(state.position == traj.positions[static_cast<std::size_t>(t + 1)]);
  }
}

TEST_CASE("range_at: prefix range and monotone growth") {
  Trajectory traj;
  traj.positions = {0, 15, 14};
  CHECK(range_at(traj, 0) == std::set<i64>{0});
  CHECK(range_at(traj, 2) == std::set<i64>{0, 14, 15});
  CHECK_THROWS_AS(range_at(traj, 3), std::out_of_range);
  CHECK_THROWS_AS(range_at(traj, -1), std::out_of_range);

  const CookieEnvironment env =
      CookieEnvironment::single(JumpDistribution::epsilon_family(5, 0.1));
  const Trajectory sim = simulate(env, 17, 300);
  std::size_t prev = 0;
  for (i64 t = 0; t <= 300; t += 25) {
    const auto r = range_at(sim, t);
    CHECK(r.size() >= prev);
    prev = r.size();
  }
}

TEST_CASE("fresh increments stay in the jump window, revisits move by one") {
  const CookieEnvironment env =
      CookieEnvironment::single(JumpDistribution::epsilon_family(15, 0.05));
  const Trajectory traj = simulate(env, 12, 20000);
  std::unordered_set<i64> seen;  // occupations strictly before the departure
  for (std::size_t t = 1; t < traj.positions.size(); ++t) {
    const i64 from = traj.positions[t - 1];
    const i64 d = traj.positions[t] - from;
    if (seen.count(from)) {
      CHECK((d == 1 || d == -1));
    } else {
      CHECK(d >= -1);
      CHECK(d <= 15);
    }
    seen.insert(from);
  }
}

TEST_CASE("forward jumps never skip over unvisited range") {
  const CookieEnvironment env =
      CookieEnvironment::single(JumpDistribution::epsilon_family(15, 0.3));
  const Trajectory traj = simulate(env, 2, 30000);
  std::unordered_set<i64> seen;
  for (std::size_t t = 0; t < traj.positions.size(); ++t) {
    const i64 y = traj.positions[t];
    if (t > 0 && seen.count(y) && traj.positions[t - 1] < y) {
      for (i64 v = traj.positions[t - 1]; v <= y; ++v) {
        CHECK(seen.count(v));
      }
    }
    seen.insert(y);
  }
}

TEST_CASE("walk co-driven with its coin dominates it pathwise") {
  // Holds whenever Q(1) >= 1/2 for the excited law.
  const CookieEnvironment env =
      CookieEnvironment::single(JumpDistribution::epsilon_family(15, 0.01));
  WalkState state;
  UniformSource uniforms(321, 0);
  i64 coin_pos = 0;
  i64 violations = 0;
  for (int t = 0; t < 50000; ++t) {
    const double u = uniforms.next();
    step(state, env, u);
    coin_pos += u < 0.5 ? 1 : -1;
    violations += state.position < coin_pos;
  }
  CHECK(violations == 0);
}

TEST_CASE("fresh-vertex increment frequencies match the law at 3 standard errors") {
  const double eps = 0.01;
  const CookieEnvironment env =
      CookieEnvironment::single(JumpDistribution::epsilon_family(15, eps));
  const Trajectory traj = simulate(env, 4242, 100000);
  std::unordered_set<i64> seen;
  std::map<i64, i64> freq;
  i64 fresh_steps = 0;
  for (std::size_t t = 0; t + 1 < traj.positions.size(); ++t) {
    const i64 from = traj.positions[t];
    if (!seen.count(from)) {
      ++fresh_steps;
      ++freq[traj.positions[t + 1] - from];
    }
    seen.insert(from);
  }
  REQUIRE(fresh_steps > 50000);
  const double n = static_cast<double>(fresh_steps);
  for (const auto [jump, expected] : std::map<i64, double>{{-1, eps}, {15, 1.0 - eps}}) {
    const double observed = static_cast<double>(freq[jump]) / n;
    const double se = std::sqrt(expected * (1.0 - expected) / n);
    CHECK(std::abs(observed - expected) <= 3.0 * se);
  }
}

TEST_CASE("serialization round trip") {
  const CookieEnvironment env =
      CookieEnvironment::single(JumpDistribution::epsilon_family(15, 0.01));
  const Trajectory traj = simulate(env, 77, 1000);
  const Trajectory round = deserialize(serialize(traj));
  CHECK(round.positions == traj.positions);
  CHECK(round.seed == traj.seed);
  CHECK(round.env_hash == traj.env_hash);
  CHECK_THROWS_AS(deserialize("garbage"), std::invalid_argument);
}

} // TEST_SUITE

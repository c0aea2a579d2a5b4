#include "cwl/renewal.hpp"

#include "cwl/criteria.hpp"
#include "reference_oracles.hpp"

#include "doctest.h"

#include <stdexcept>

#include <cmath>

using namespace cwl;

namespace {

Trajectory make_traj(std::vector<i64> positions) {
  Trajectory traj;
  traj.positions = std::move(positions);
  return traj;
}

} // namespace

TEST_SUITE("renewal") {

TEST_CASE("monotone maximal-jump path: every step is a cut time except the guarded tail") {
  const int L = 5;
  std::vector<i64> y;
  for (i64 t = 0; t <= 20; ++t) {
    y.push_back(L * t);
  }
  const auto records = detect_cut_times(make_traj(y), L, 3);
  REQUIRE(records.size() == 18);  // t = 0..17; 18 and 19 censored by the guard
  for (std::size_t i = 0; i < records.size(); ++i) {
    CHECK(records[i].tau == static_cast<i64>(i));
    CHECK(records[i].position == static_cast<i64>(i) * L);
  }
}

TEST_CASE("a dip below the landing point disqualifies the jump") {
  const int L = 5;
  // 0, L, L-1, 2L-1: the first jump is maximal from a running max but the
  // path falls back below L afterwards.
  const auto records = detect_cut_times(make_traj({0, 5, 4, 9}), L, 1);
  CHECK(records.empty());
}

TEST_CASE("detector agrees with the quadratic reference scan") {
  const CookieEnvironment env =
      CookieEnvironment::single(JumpDistribution::epsilon_family(15, 0.05));
  for (u64 seed : {11u, 12u, 13u}) {
    const Trajectory traj = simulate(env, seed, 3000);
    for (i64 guard : {1, 25, 162}) {
      const auto fast = detect_cut_times(traj, 15, guard);
      const auto slow = refo::cut_times(traj.positions, 15, guard);
      REQUIRE(fast.size() == slow.size());
      for (std::size_t i = 0; i < fast.size(); ++i) {
        CHECK(fast[i].tau == slow[i].tau);
        CHECK(fast[i].position == slow[i].position);
      }
    }
  }
}

TEST_CASE("cut-time records re-verify their defining conditions") {
  const CookieEnvironment env =
      CookieEnvironment::single(JumpDistribution::epsilon_family(15, 0.01));
  const Trajectory traj = simulate(env, 21, 20000);
  const auto records = detect_cut_times(traj, 15, default_guard(env));
  REQUIRE(records.size() > 100);
  i64 violations = 0;
  for (const auto& rec : records) {
    if (traj.positions[static_cast<std::size_t>(rec.tau)] != rec.position ||
        traj.positions[static_cast<std::size_t>(rec.tau + 1)] != rec.position + 15) {
      ++violations;
    }
    for (i64 s = 0; s < rec.tau; ++s) {
      violations += traj.positions[static_cast<std::size_t>(s)] >= rec.position;
    }
    for (i64 u = rec.tau + 1; u <= traj.horizon(); ++u) {
      violations += traj.positions[static_cast<std::size_t>(u)] < rec.position + 15;
    }
  }
  CHECK(violations == 0);
}

TEST_CASE("renewal estimator: constant gaps give a point with zero-width interval") {
  std::vector<CutTimeRecord> records;
  for (i64 k = 0; k < 10; ++k) {
    records.push_back({k, 5 * k});
  }
  const auto est = estimate_speed_renewal(records);
  REQUIRE(est.has_value());
  CHECK(est->point == doctest::Approx(5.0).epsilon(1e-15));
  CHECK(est->ci_low == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(est->ci_high == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(est->n_renewals == 10);

  const std::vector<CutTimeRecord> two{{0, 0}, {4, 20}};
  CHECK(!estimate_speed_renewal(two).has_value());
}

TEST_CASE("naive estimator") {
  std::vector<i64> y;
  for (i64 t = 0; t <= 100; ++t) {
    y.push_back(t);
  }
  CHECK(estimate_speed_naive(make_traj(y)).point == doctest::Approx(1.0));
  CHECK_THROWS_AS(estimate_speed_naive(make_traj({0})), std::invalid_argument);
}

TEST_CASE("renewal and naive estimates agree on long transient runs") {
  const CookieEnvironment env =
      CookieEnvironment::single(JumpDistribution::epsilon_family(15, 0.01));
  for (u64 seed : {1u, 2u}) {
    const Trajectory traj = simulate(env, seed, 1000000);
    const auto cuts = detect_cut_times(traj, 15, default_guard(env));
    const auto renewal = estimate_speed_renewal(cuts);
    REQUIRE(renewal.has_value());
    const double naive = estimate_speed_naive(traj).point;
    CHECK(std::abs(renewal->point - naive) / naive <= 0.05);
  }
}

TEST_CASE("estimator sandwich between consecutive cut times") {
  const CookieEnvironment env =
      CookieEnvironment::single(JumpDistribution::epsilon_family(15, 0.01));
  const Trajectory traj = simulate(env, 3, 100000);
  const auto records = detect_cut_times(traj, 15, default_guard(env));
  REQUIRE(records.size() > 50);
  i64 violations = 0;
  for (std::size_t k = 1; k + 1 < records.size(); ++k) {
    const auto& lo = records[k];
    const auto& hi = records[k + 1];
    for (i64 t = std::max<i64>(lo.tau, 1); t < hi.tau; ++t) {
      const i64 yt = traj.positions[static_cast<std::size_t>(t)];
      violations += lo.position * t > yt * hi.tau;  // J_k / tau_{k+1} <= Y_t / t
      violations += yt * lo.tau > hi.position * t;  // Y_t / t <= J_{k+1} / tau_k
    }
  }
  CHECK(violations == 0);
}

TEST_CASE("exactly-once blocks") {
  const int L = 5;
  std::vector<i64> monotone;
  for (i64 t = 0; t <= 10; ++t) {
    monotone.push_back(L * t);
  }
  // Blocks 0..9 are passed and occupied once; block 10 holds the endpoint.
  CHECK(exactly_once_blocks(make_traj(monotone), L) == 10);

  // Nearest-neighbour stretch: every passed block is occupied at least L times.
  std::vector<i64> crawl;
  for (i64 t = 0; t <= 30; ++t) {
    crawl.push_back(t);
  }
  CHECK(exactly_once_blocks(make_traj(crawl), L) == 0);

  // Brute-force comparison on a simulated path.
  const CookieEnvironment env =
      CookieEnvironment::single(JumpDistribution::epsilon_family(15, 0.02));
  const Trajectory traj = simulate(env, 77, 5000);
  i64 expected = 0;
  const i64 max_pos = *std::max_element(traj.positions.begin(), traj.positions.end());
  for (i64 j = 0; (j + 1) * 15 <= max_pos; ++j) {
    i64 occupancy = 0;
    for (const i64 y : traj.positions) {
      if (y >= j * 15 && y < (j + 1) * 15) {
        ++occupancy;
      }
    }
    if (occupancy == 1) {
      ++expected;
    }
  }
  CHECK(exactly_once_blocks(traj, 15) == expected);
}

TEST_CASE("exactly-once block frequency respects the alpha q(L) lower bound") {
  const double eps = 0.01;
  const CookieEnvironment env =
      CookieEnvironment::single(JumpDistribution::epsilon_family(15, eps));
  const i64 horizon = 100000;
  const u64 replicas = 40;
  const AlphaEstimate alpha = estimate_alpha(env, replicas, horizon, 888, ExecMode::serial);

  double block_hits = 0.0, blocks_total = 0.0;
  for (u64 r = 0; r < replicas; ++r) {
    const Trajectory traj = simulate(env, 888, horizon, r + 1000);
    const i64 max_pos = *std::max_element(traj.positions.begin(), traj.positions.end());
    block_hits += static_cast<double>(exactly_once_blocks(traj, 15));
    blocks_total += static_cast<double>(max_pos / 15);
  }
  const double freq = block_hits / blocks_total;
  const double bound = alpha.point * (1.0 - eps);
  const double se_freq = std::sqrt(freq * (1.0 - freq) / blocks_total);
  CHECK(freq >= bound - 3.0 * (se_freq + alpha.se));
}

TEST_CASE("alpha estimate: monotone family cases") {
  const CookieEnvironment deterministic =
      CookieEnvironment::single(JumpDistribution({{4, 1.0}}));
  const auto alpha = estimate_alpha(deterministic, 50, 2000, 5, ExecMode::serial);
  CHECK(alpha.point == 1.0);
  CHECK(alpha.horizon == 2000);

  const CookieEnvironment recurrent =
      CookieEnvironment::single(JumpDistribution::symmetric_coin());
  const auto low = estimate_alpha(recurrent, 200, 100000, 5, ExecMode::serial);
  CHECK(low.point < 0.05);

  const CookieEnvironment transient =
      CookieEnvironment::single(JumpDistribution::epsilon_family(15, 0.01));
  const auto a4 = estimate_alpha(transient, 200, 10000, 5, ExecMode::serial);
  const auto a5 = estimate_alpha(transient, 200, 100000, 5, ExecMode::serial);
  CHECK(a5.point <= a4.point);  // never-below-zero events only shrink
  CHECK(a5.point > 0.0);
  const double se = std::sqrt(a4.se * a4.se + a5.se * a5.se);
  CHECK(std::abs(a4.point - a5.point) <= 2.0 * se + 1e-12);
}

TEST_CASE("default guard scales with the jump range and drift") {
  const CookieEnvironment env =
      CookieEnvironment::single(JumpDistribution::epsilon_family(15, 0.01));
  const i64 guard = default_guard(env);
  CHECK(guard == static_cast<i64>(std::ceil(10.0 * 225.0 / (14.84 - 1.0))));
}

} // TEST_SUITE

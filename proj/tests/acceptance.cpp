// Acceptance suite: one line per criterion, nonzero exit if any fails.
// Workloads are Monte Carlo at fixed seeds, so results are reproducible.

#include "cwl/criteria.hpp"
#include "cwl/ensemble.hpp"
#include "cwl/lemmas.hpp"
#include "cwl/renewal.hpp"
#include "cwl/rng.hpp"
#include "cwl/walk.hpp"

#include <chrono>
#include <cmath>
#include <cstring>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>

namespace {

using namespace cwl;

struct Runner {
  int failed = 0;
  int total = 0;
  double wall_total = 0.0;

  template <class Fn>
  void criterion(int id, const std::string& name, Fn&& fn) {
    ++total;
    const auto start = std::chrono::steady_clock::now();
    bool pass = false;
    std::string detail;
    try {
      pass = fn(detail);
    } catch (const std::exception& e) {
      pass = false;
      detail = std::string("exception: ") + e.what();
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    wall_total += seconds;
    if (!pass) {
      ++failed;
    }
    std::cout << "[" << std::setw(2) << id << "] " << (pass ? "PASS" : "FAIL") << " " << name
              << " (" << std::fixed << std::setprecision(1) << seconds << " s)";
    if (!detail.empty()) {
      std::cout << "\n     " << detail;
    }
    std::cout << "\n" << std::flush;
  }
};

std::string fmt(double v, int digits = 6) {
  std::ostringstream out;
  out << std::setprecision(digits) << v;
  return out.str();
}

constexpr u64 kSeed = 20240801;

} // namespace

int main(int argc, char** argv) {
  bool allow_long_horizon = true;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--short") == 0) {
      allow_long_horizon = false;  // cap the coarse-walk run at 1e6 steps
    }
  }

  Runner runner;
  const JumpDistribution family_001 = JumpDistribution::epsilon_family(15, 0.01);
  const MegaVertexConfig mega(3, 13);

  runner.criterion(1, "condition frontier at (c, ell) = (3, 13) sits at eps = 1/66", [&](std::string& detail) {
    const auto family = [](double eps) { return JumpDistribution::epsilon_family(15, eps); };
    const auto frontier = frontier_epsilon(3, 13, family);
    if (!frontier) {
      detail = "no frontier found";
      return false;
    }
    const double err = std::abs(*frontier - 1.0 / 66.0);
    // The flip itself is resolved to the frontier tolerance: the lhs slope in
    // eps is about -1.69, so +-1e-9 probes sit clear of double rounding.
    const bool below = ballisticity_condition(family(1.0 / 66.0 - 1e-9), 3, 13).satisfied;
    const bool above = ballisticity_condition(family(1.0 / 66.0 + 1e-9), 3, 13).satisfied;
    detail = "frontier = " + fmt(*frontier, 12) + ", |err| = " + fmt(err, 3) +
             ", satisfied just below / just above = " + std::to_string(below) + "/" +
             std::to_string(above);
    return err <= 1e-9 && below && !above;
  });

  runner.criterion(2, "drift identities and recurrence classification", [&](std::string& detail) {
    double worst = 0.0;
    for (const double eps : {0.0, 0.01, 0.05}) {
      const double delta = total_drift(
          CookieEnvironment::single(JumpDistribution::epsilon_family(15, eps)));
      worst = std::max(worst, std::abs(delta - (15.0 - 16.0 * eps)));
    }
    const Classification coin_class =
        classify(total_drift(CookieEnvironment::single(JumpDistribution::symmetric_coin())));
    const Classification family_class =
        classify(total_drift(CookieEnvironment::single(family_001)));
    detail = "max |delta - (15 - 16 eps)| = " + fmt(worst, 3) +
             ", coin -> " + to_string(coin_class) + ", eps-family -> " + to_string(family_class);
    return worst <= 1e-12 && coin_class == Classification::recurrent &&
           family_class == Classification::transient;
  });

  runner.criterion(3, "positive speed: eps = 0.01, 100 replicas, horizon 1e6", [&](std::string& detail) {
    SpeedRunConfig cfg;
    cfg.replicas = 100;
    cfg.horizon = 1000000;
    cfg.seed = kSeed;
    cfg.level = 0.99;
    const SpeedEnsemble out =
        run_speed_ensemble(CookieEnvironment::single(family_001), cfg, ExecMode::openmp);
    const double rel =
        std::abs(out.renewal_pooled - out.naive_mean) / std::max(out.naive_mean, 1e-12);
    detail = "naive mean = " + fmt(out.naive_mean) + ", 99% CI [" + fmt(out.naive_ci_mean_lo) +
             ", " + fmt(out.naive_ci_mean_hi) + "], renewal pooled = " + fmt(out.renewal_pooled) +
             ", rel gap = " + fmt(rel, 3);
    return out.errors.empty() && out.all_naive_positive && out.naive_ci_mean_lo > 0.0 &&
           out.has_renewal_pooled && rel <= 0.05;
  });

  runner.criterion(4, "recurrence sanity: symmetric coin revisits the origin", [&](std::string& detail) {
    SpeedRunConfig cfg;
    cfg.replicas = 200;
    cfg.horizon = 100000;
    cfg.seed = kSeed + 1;
    cfg.guard = 1;
    const SpeedEnsemble out = run_speed_ensemble(
        CookieEnvironment::single(JumpDistribution::symmetric_coin()), cfg, ExecMode::openmp);
    u64 enough = 0;
    for (const auto& row : out.rows) {
      if (row.origin_returns >= 10) {
        ++enough;
      }
    }
    detail = std::to_string(enough) + " / 200 replicas with >= 10 origin returns";
    return out.errors.empty() && enough >= 190;
  });

  runner.criterion(5, "arrow round-trip over 100 coin paths of length 1e5", [&](std::string& detail) {
    const CookieEnvironment coin =
        CookieEnvironment::single(JumpDistribution::symmetric_coin());
    u64 mismatches = 0;
    for (u64 r = 0; r < 100; ++r) {
      const Trajectory traj = simulate(coin, kSeed + 2, 100000, r);
      const ArrowSystem arrows = extract_arrows(traj.positions);
      if (walk_from_arrows(arrows, traj.horizon()) != traj.positions) {
        ++mismatches;
      }
    }
    detail = std::to_string(mismatches) + " mismatched replays";
    return mismatches == 0;
  });

  // One coupled ensemble feeds criteria 6 through 9.
  CouplingEnsemble coupled;
  {
    const auto start = std::chrono::steady_clock::now();
    CouplingRunConfig cfg;
    cfg.replicas = 20;
    cfg.horizon = 1000000;
    cfg.seed = kSeed + 3;
    coupled = run_coupling_ensemble(family_001, mega, cfg, ExecMode::openmp);
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    runner.wall_total += seconds;
    std::cout << "     (shared coupled run for criteria 6-9: 20 replicas at horizon 1e6, "
              << std::fixed << std::setprecision(1) << seconds << " s)\n";
  }

  runner.criterion(6, "dominance chain K >= H >= E and coupled arrow pair", [&](std::string& detail) {
    const MegaArrowLaw law = mega_arrow_law(family_001, mega);
    const auto sampler = [&](i64 j, i64 k, const ArrowSystem&) {
      const double b = law.p_plus(k);
      return b + (1.0 - b) * 0.5 * uniform_at(kSeed + 4, zigzag64(j), static_cast<u64>(k));
    };
    const StrassenBundle bundle =
        strassen_bundle(law, sampler, substream(kSeed, 5), 0, 3999, 25);
    detail = "chain failures = " + std::to_string(coupled.dominance_failures) +
             ", coupled indices = " + std::to_string(bundle.indices) +
             ", pair violations = " + std::to_string(bundle.dominance_violations);
    return coupled.dominance_failures == 0 && coupled.errors.empty() &&
           bundle.indices >= 100000 && bundle.dominance_violations == 0;
  });

  runner.criterion(7, "block sandwich across 20 replicas at horizon 1e6", [&](std::string& detail) {
    detail = "checked = " + std::to_string(coupled.sandwich_checked) +
             ", violations = " + std::to_string(coupled.sandwich_violations) +
             " (literal-sigma diagnostic: " + std::to_string(coupled.literal_sigma_violations) +
             ")";
    return coupled.sandwich_checked > 0 && coupled.sandwich_violations == 0;
  });

  runner.criterion(8, "branch lower bounds on pooled trigger records", [&](std::string& detail) {
    detail = "records = " + std::to_string(coupled.completed) +
             ", cookie P(+1) = " + fmt(coupled.cookie.frac) + " vs bound " +
             fmt(coupled.cookie.bound) + " (n = " + std::to_string(coupled.cookie.n) +
             "), no-cookie P(+1) = " + fmt(coupled.no_cookie.frac) + " vs 0.5 (n = " +
             std::to_string(coupled.no_cookie.n) + ")";
    return coupled.completed >= 10000 && coupled.cookie.pass && coupled.no_cookie.pass;
  });

  runner.criterion(9, "trigger ordering and non-intertwining, pathwise", [&](std::string& detail) {
    detail = "ordering violations = " + std::to_string(coupled.ordering_violations) +
             ", intertwining = " + std::to_string(coupled.intertwine_violations) +
             ", non-increasing block times = " + std::to_string(coupled.h_increase_violations);
    return coupled.ordering_violations == 0 && coupled.intertwine_violations == 0 &&
           coupled.h_increase_violations == 0 && coupled.first_entry_violations == 0 &&
           coupled.no_cookie_low_k == 0;
  });

  runner.criterion(10, "width-6 exit: second moment and pathwise block bound", [&](std::string& detail) {
    const auto report = lemmas::exit_time_moments(
        [](u64) { return lemmas::CoinProcess(3); }, 0, 6, 3, 10000, kSeed + 6);
    detail = "E[T^2] = " + fmt(report.mean_t2) + " <= 49152, block-bound violations = " +
             std::to_string(report.block_bound_violations) + ", censored = " +
             std::to_string(report.censored);
    return report.replicas == 10000 && report.mean_t2 <= 49152.0 &&
           report.block_bound_violations == 0 && report.censored == 0;
  });

  runner.criterion(11, "coupled pair: pathwise dominance and both marginals", [&](std::string& detail) {
    const auto upper_law = lemmas::DiscreteLaw::from_jump(family_001);
    const auto lower_law =
        lemmas::DiscreteLaw::from_jump(JumpDistribution::symmetric_coin());
    try {
      const auto pair = lemmas::strassen_pair(
          [&](u64) { return lower_law; },
          [&](u64, std::span<const i64>) { return upper_law; }, kSeed + 7, 100000);
      u64 violations = 0;
      for (std::size_t i = 0; i < pair.upper.size(); ++i) {
        violations += pair.upper[i] < pair.lower[i];
      }
      const double ks_upper = lemmas::ks_distance(pair.upper, upper_law);
      const double ks_lower = lemmas::ks_distance(pair.lower, lower_law);
      detail = "violations = " + std::to_string(violations) + " / 100000, KS = " +
               fmt(ks_upper, 4) + " and " + fmt(ks_lower, 4);
      return violations == 0 && ks_upper <= 0.02 && ks_lower <= 0.02;
    } catch (const lemmas::DominanceViolation& e) {
      detail = e.what();
      return false;
    }
  });

  runner.criterion(12, "coarse-walk ballisticity near the drift threshold", [&](std::string& detail) {
    const MegaArrowLaw law = mega_arrow_law(family_001, mega);
    MWalkRunConfig cfg;
    cfg.replicas = 100;
    cfg.seed = kSeed + 8;
    cfg.level = 0.99;
    cfg.horizon = 1000000;
    MWalkEnsemble out = run_mwalk_ensemble(law, cfg, ExecMode::openmp);
    std::string note = "horizon 1e6";
    if (out.ci_lo <= 0.0 && allow_long_horizon) {
      // Drift sits barely above the threshold; the documented fallback is a
      // ten-fold horizon.
      cfg.horizon = 10000000;
      out = run_mwalk_ensemble(law, cfg, ExecMode::openmp);
      note = "horizon raised to 1e7";
    }
    detail = "delta* = " + fmt(law.delta_star(), 7) + ", mean speed = " + fmt(out.mean) +
             ", 99% CI [" + fmt(out.ci_lo) + ", " + fmt(out.ci_hi) + "], positive replicas = " +
             std::to_string(out.positive) + "/100, " + note;
    return out.mean > 0.0 && out.ci_lo > 0.0;
  });

  std::cout << runner.total << " criteria: " << (runner.total - runner.failed) << " passed, "
            << runner.failed << " failed (wall " << std::fixed << std::setprecision(1)
            << runner.wall_total << " s)\n";
  return runner.failed == 0 ? 0 : 1;
}

// Experiment runner for long-range once-excited (cookie) random walks:
// drift criteria, trajectory simulation, renewal speed estimation, the
// mega-vertex arrow coupling checks, and the shared-uniform lemma suites.

#include "cwl/criteria.hpp"
#include "cwl/ensemble.hpp"
#include "cwl/lemmas.hpp"
#include "cwl/renewal.hpp"
#include "cwl/rng.hpp"
#include "cwl/stats.hpp"
#include "cwl/walk.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <chrono>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

using nlohmann::ordered_json;
constexpr const char* kVersion = "cookie-walk-lab 1.0.0";
constexpr const char* kCsvSchema = "# cookie-walk-lab schema v1";

constexpr int kExitOk = 0;
constexpr int kExitInvariantFailure = 1;
constexpr int kExitConfigError = 2;

struct ConfigError final : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open file: " + path);
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// "L=15,eps=0.01" -> epsilon family; "L=15" alone leaves eps to the flag user.
struct FamilySpec {
  int max_jump = 0;
  std::optional<double> eps;
};

FamilySpec parse_family(const std::string& text) {
  FamilySpec spec;
  std::stringstream in(text);
  std::string item;
  bool have_l = false;
  while (std::getline(in, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("family: expected key=value, got '" + item + "'");
    }
    const std::string key = item.substr(0, eq);
    const std::string value = item.substr(eq + 1);
    if (key == "L") {
      spec.max_jump = std::stoi(value);
      have_l = true;
    } else if (key == "eps" || key == "epsilon") {
      spec.eps = std::stod(value);
    } else {
      throw ConfigError("family: unknown key '" + key + "'");
    }
  }
  if (!have_l) {
    throw ConfigError("family: missing L");
  }
  return spec;
}

// Shared distribution/run options, resolved from a config file then flags.
struct Options {
  std::string dist_path;
  std::string family;
  cwl::u64 seed = 12345;
  cwl::u64 replicas = 100;
  cwl::i64 horizon = 100000;
  cwl::i64 guard = 0;
  int c = 0;
  int ell = 0;
  double level = 0.99;
  std::string out;      // "csv", "json", or a path (format from extension)
  std::string exec = "openmp";
  std::string eps_range;
  bool grid = false;
  bool dump_config = false;
};

void load_config_file(const std::string& path, Options& opt) {
  const auto j = nlohmann::json::parse(slurp(path));
  if (j.contains("dist")) opt.dist_path = j["dist"].get<std::string>();
  if (j.contains("family")) opt.family = j["family"].get<std::string>();
  if (j.contains("seed")) opt.seed = j["seed"].get<cwl::u64>();
  if (j.contains("replicas")) opt.replicas = j["replicas"].get<cwl::u64>();
  if (j.contains("horizon")) opt.horizon = j["horizon"].get<cwl::i64>();
  if (j.contains("guard")) opt.guard = j["guard"].get<cwl::i64>();
  if (j.contains("c")) opt.c = j["c"].get<int>();
  if (j.contains("ell")) opt.ell = j["ell"].get<int>();
  if (j.contains("level")) opt.level = j["level"].get<double>();
  if (j.contains("out")) opt.out = j["out"].get<std::string>();
  if (j.contains("exec")) opt.exec = j["exec"].get<std::string>();
  if (j.contains("eps")) opt.eps_range = j["eps"].get<std::string>();
}

cwl::JumpDistribution resolve_distribution(const Options& opt) {
  if (!opt.dist_path.empty() && !opt.family.empty()) {
    throw ConfigError("give either --dist or --family, not both");
  }
  if (!opt.dist_path.empty()) {
    return cwl::JumpDistribution::from_json_text(slurp(opt.dist_path));
  }
  if (!opt.family.empty()) {
    const FamilySpec spec = parse_family(opt.family);
    if (!spec.eps) {
      throw ConfigError("family: missing eps");
    }
    return cwl::JumpDistribution::epsilon_family(spec.max_jump, *spec.eps);
  }
  throw ConfigError("no distribution: give --dist <json file> or --family L=..,eps=..");
}

cwl::ExecMode resolve_exec(const Options& opt) {
  if (opt.exec == "serial") return cwl::ExecMode::serial;
  if (opt.exec == "openmp") return cwl::ExecMode::openmp;
  throw ConfigError("exec: expected 'serial' or 'openmp'");
}

ordered_json config_echo(const Options& opt) {
  ordered_json j;
  if (!opt.dist_path.empty()) j["dist"] = opt.dist_path;
  if (!opt.family.empty()) j["family"] = opt.family;
  j["seed"] = opt.seed;
  j["replicas"] = opt.replicas;
  j["horizon"] = opt.horizon;
  if (opt.guard > 0) j["guard"] = opt.guard;
  if (opt.c > 0) j["c"] = opt.c;
  if (opt.ell > 0) j["ell"] = opt.ell;
  j["level"] = opt.level;
  j["exec"] = opt.exec;
  return j;
}

std::string fmt_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void emit(const std::string& text, const std::string& out_spec) {
  if (out_spec.empty() || out_spec == "csv" || out_spec == "json") {
    std::cout << text;
    return;
  }
  std::ofstream f(out_spec);
  if (!f) {
    throw ConfigError("cannot write file: " + out_spec);
  }
  f << text;
}

bool csv_requested(const Options& opt, bool default_csv) {
  if (opt.out == "csv") return true;
  if (opt.out == "json") return false;
  if (opt.out.size() >= 4 && opt.out.substr(opt.out.size() - 4) == ".csv") return true;
  if (opt.out.size() >= 5 && opt.out.substr(opt.out.size() - 5) == ".json") return false;
  return default_csv;
}

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

ordered_json criteria_json(const cwl::CriteriaReport& report) {
  ordered_json j;
  j["delta"] = report.delta;
  j["classification"] = cwl::to_string(report.classification);
  j["c"] = report.c;
  j["ell"] = report.ell;
  j["condition_lhs"] = report.condition_lhs;
  j["condition_rhs"] = report.condition_rhs;
  j["satisfied"] = report.satisfied;
  j["delta_above_two"] = report.delta_above_two;
  j["q_table_base"] = report.q_table_base;
  j["q_table"] = report.q_table;
  return j;
}

int run_criteria(const Options& opt) {
  Timer timer;
  const cwl::JumpDistribution q = resolve_distribution(opt);
  ordered_json out;
  out["config"] = config_echo(opt);
  out["distribution"] = nlohmann::json::parse(q.to_json_text());
  out["delta"] = q.mean();
  out["classification"] = cwl::to_string(cwl::classify(q.mean()));
  out["support_points"] = q.support_size();
  if (opt.c > 0 || opt.ell > 0) {
    if (opt.c < 3 || opt.ell < 3 * opt.c) {
      throw ConfigError("criteria: need c >= 3 and ell >= 3c");
    }
    out["condition"] = criteria_json(cwl::ballisticity_condition(q, opt.c, opt.ell));
    if (!opt.family.empty()) {
      const FamilySpec spec = parse_family(opt.family);
      const auto frontier = cwl::frontier_epsilon(opt.c, opt.ell, [&](double eps) {
        return cwl::JumpDistribution::epsilon_family(spec.max_jump, eps);
      });
      if (frontier) {
        out["frontier_epsilon"] = *frontier;
      } else {
        out["frontier_epsilon"] = nullptr;
      }
    }
  } else if (const auto pair = cwl::search_parameters(q)) {
    out["searched_parameters"] = {{"c", pair->first}, {"ell", pair->second}};
  } else {
    out["searched_parameters"] = nullptr;
  }
  out["wall_time_s"] = timer.seconds();
  out["version"] = kVersion;
  emit(out.dump(2) + "\n", opt.out);
  return kExitOk;
}

int run_simulate(const Options& opt, const std::string& traj_out) {
  Timer timer;
  const cwl::JumpDistribution q = resolve_distribution(opt);
  const cwl::CookieEnvironment env = cwl::CookieEnvironment::single(q);
  const cwl::Trajectory traj = cwl::simulate(env, opt.seed, opt.horizon);
  if (!traj_out.empty()) {
    std::ofstream f(traj_out);
    if (!f) {
      throw ConfigError("cannot write file: " + traj_out);
    }
    f << cwl::serialize(traj);
  }
  ordered_json out;
  out["config"] = config_echo(opt);
  out["final_position"] = traj.positions.back();
  out["range_size"] = cwl::range_at(traj, traj.horizon()).size();
  out["naive_speed"] = opt.horizon > 0 ? cwl::estimate_speed_naive(traj).point : 0.0;
  std::ostringstream env_hash;
  env_hash << std::hex << traj.env_hash;
  out["env_hash"] = env_hash.str();
  out["wall_time_s"] = timer.seconds();
  out["version"] = kVersion;
  emit(out.dump(2) + "\n", opt.out.empty() || !traj_out.empty() ? "" : opt.out);
  return kExitOk;
}

std::string speed_csv(const cwl::SpeedEnsemble& ensemble) {
  std::ostringstream csv;
  csv << kCsvSchema << "\n";
  csv << "seed,method,point,ci_low,ci_high,n_renewals\n";
  for (const auto& row : ensemble.rows) {
    csv << row.replica << ",naive," << fmt_double(row.naive) << "," << fmt_double(row.naive)
        << "," << fmt_double(row.naive) << ",0\n";
    if (row.has_renewal) {
      csv << row.replica << ",renewal," << fmt_double(row.renewal.point) << ","
          << fmt_double(row.renewal.ci_low) << "," << fmt_double(row.renewal.ci_high) << ","
          << row.renewal.n_renewals << "\n";
    }
  }
  csv << "all,naive," << fmt_double(ensemble.naive_mean) << ","
      << fmt_double(ensemble.naive_ci_mean_lo) << "," << fmt_double(ensemble.naive_ci_mean_hi)
      << ",0\n";
  if (ensemble.has_renewal_pooled) {
    csv << "all,renewal," << fmt_double(ensemble.renewal_pooled) << ","
        << fmt_double(ensemble.renewal_pooled) << "," << fmt_double(ensemble.renewal_pooled)
        << "," << ensemble.replicas_with_renewal << "\n";
  }
  return csv.str();
}

ordered_json speed_json(const cwl::SpeedEnsemble& ensemble) {
  ordered_json j;
  j["guard"] = ensemble.guard;
  j["level"] = ensemble.level;
  j["naive_mean"] = ensemble.naive_mean;
  j["naive_se"] = ensemble.naive_se;
  j["naive_ci_mean"] = {ensemble.naive_ci_mean_lo, ensemble.naive_ci_mean_hi};
  j["naive_ci_percentile"] = {ensemble.naive_pct_lo, ensemble.naive_pct_hi};
  j["all_naive_positive"] = ensemble.all_naive_positive;
  j["renewal_pooled"] = ensemble.renewal_pooled;
  j["renewal_mean"] = ensemble.renewal_mean;
  j["replicas_with_renewal"] = ensemble.replicas_with_renewal;
  j["alpha_estimate"] = ensemble.alpha_estimate;
  j["alpha_se"] = ensemble.alpha_se;
  if (!ensemble.errors.empty()) {
    j["errors"] = ensemble.errors;
  }
  return j;
}

int run_speed(const Options& opt) {
  Timer timer;
  const cwl::JumpDistribution q = resolve_distribution(opt);
  const cwl::CookieEnvironment env = cwl::CookieEnvironment::single(q);
  cwl::SpeedRunConfig cfg;
  cfg.replicas = opt.replicas;
  cfg.horizon = opt.horizon;
  cfg.seed = opt.seed;
  cfg.guard = opt.guard;
  cfg.level = opt.level;
  const cwl::SpeedEnsemble ensemble = cwl::run_speed_ensemble(env, cfg, resolve_exec(opt));
  if (csv_requested(opt, false)) {
    emit(speed_csv(ensemble), opt.out);
  } else {
    ordered_json out;
    out["config"] = config_echo(opt);
    if (opt.c >= 3 && opt.ell >= 3 * opt.c) {
      out["condition"] = criteria_json(cwl::ballisticity_condition(q, opt.c, opt.ell));
    }
    out["speed"] = speed_json(ensemble);
    out["wall_time_s"] = timer.seconds();
    out["version"] = kVersion;
    emit(out.dump(2) + "\n", opt.out);
  }
  return ensemble.errors.empty() ? kExitOk : kExitInvariantFailure;
}

ordered_json branch_json(const cwl::BranchStat& stat) {
  ordered_json j;
  j["n"] = stat.n;
  j["plus_fraction"] = stat.frac;
  j["se"] = stat.se;
  j["bound"] = stat.bound;
  j["pass"] = stat.pass;
  j["low_stack"] = {{"n", stat.n_low_k}, {"plus", stat.plus_low_k}};
  j["high_stack"] = {{"n", stat.n_high_k}, {"plus", stat.plus_high_k}};
  return j;
}

int run_couple(const Options& opt) {
  Timer timer;
  const cwl::JumpDistribution q = resolve_distribution(opt);
  if (opt.c < 3 || opt.ell < 3 * opt.c) {
    throw ConfigError("couple: need c >= 3 and ell >= 3c");
  }
  const cwl::MegaVertexConfig cfg(opt.c, opt.ell);
  cwl::CouplingRunConfig run;
  run.replicas = opt.replicas;
  run.horizon = opt.horizon;
  run.seed = opt.seed;
  const cwl::CouplingEnsemble report = cwl::run_coupling_ensemble(q, cfg, run, resolve_exec(opt));

  const cwl::MegaArrowLaw law = cwl::mega_arrow_law(q, cfg);
  const auto sampler = [&](cwl::i64 j, cwl::i64 k, const cwl::ArrowSystem&) {
    const double b = law.p_plus(k);
    return b + (1.0 - b) * 0.5 * cwl::uniform_at(opt.seed ^ 0xABCDu, cwl::zigzag64(j),
                                                 static_cast<cwl::u64>(k));
  };
  const cwl::StrassenBundle strassen =
      cwl::strassen_bundle(law, sampler, cwl::substream(opt.seed, 7), 0, 999, 100);

  ordered_json out;
  out["config"] = config_echo(opt);
  out["records"] = {{"completed", report.completed}, {"censored", report.censored}};
  out["cookie_branch"] = branch_json(report.cookie);
  out["no_cookie_branch"] = branch_json(report.no_cookie);
  out["invariants"] = {
      {"trigger_ordering", report.ordering_violations == 0},
      {"non_intertwining", report.intertwine_violations == 0},
      {"block_times_strictly_increasing", report.h_increase_violations == 0},
      {"first_entry_at_origin", report.first_entry_violations == 0},
      {"no_cookie_only_after_c_sequences", report.no_cookie_low_k == 0},
      {"dominance_chain", report.dominance_failures == 0},
      {"no_backward_block_skips", report.backward_skip_violations == 0},
      {"sandwich", report.sandwich_violations == 0},
  };
  out["sandwich"] = {{"checked", report.sandwich_checked},
                     {"violations", report.sandwich_violations},
                     {"literal_sigma_violations", report.literal_sigma_violations}};
  out["block_exit"] = {{"same_block_fraction", report.same_block_frac},
                       {"limit", report.same_block_limit},
                       {"pairs", report.same_block_n},
                       {"pass", report.same_block_pass}};
  out["landings"] = {{"n", report.landings.landings},
                     {"successes", report.landings.successes},
                     {"success_rate", report.landings.success_rate},
                     {"kappa", report.landings.kappa},
                     {"unresolved", report.landings.unresolved}};
  out["mean_block_time_slope"] = report.mean_h_slope;
  out["strassen"] = {{"indices", strassen.indices},
                     {"dominance_violations", strassen.dominance_violations},
                     {"equal", strassen.equal}};
  if (!report.counterexamples.empty()) {
    out["counterexamples"] = report.counterexamples;
  }
  if (!report.errors.empty()) {
    out["errors"] = report.errors;
  }
  const bool pass = report.structural_ok() && report.cookie.pass && report.no_cookie.pass &&
                    report.same_block_pass && strassen.dominance_violations == 0;
  out["all_pass"] = pass;
  out["wall_time_s"] = timer.seconds();
  out["version"] = kVersion;
  emit(out.dump(2) + "\n", opt.out);
  return pass ? kExitOk : kExitInvariantFailure;
}

int run_verify_lemmas(const Options& opt) {
  Timer timer;
  ordered_json out;
  out["config"] = config_echo(opt);
  bool all_pass = true;

  {  // exit-time second moment, shared-uniform coin walk on a width-6 interval
    const auto report = cwl::lemmas::exit_time_moments(
        [](cwl::u64) { return cwl::lemmas::CoinProcess(3); }, 0, 6, 3, opt.replicas, opt.seed);
    const bool pass =
        report.bound_ok && report.block_bound_violations == 0 && report.censored == 0;
    all_pass = all_pass && pass;
    out["exit_time"] = {{"replicas", report.replicas},
                        {"mean_T", report.mean_t},
                        {"mean_T2", report.mean_t2},
                        {"se_T2", report.se_t2},
                        {"bound", report.second_moment_bound},
                        {"block_bound_violations", report.block_bound_violations},
                        {"pass", pass}};
  }

  {  // adapted-sum slope under a declared conditional second moment
    cwl::UniformSource stream(cwl::substream(opt.seed, 2), 0);
    const auto uniform_report = cwl::lemmas::martingale_lln_check(
        [&] { return 2.0 * stream.next() - 1.0; }, 1.0, opt.replicas * 10);
    const auto constant_report = cwl::lemmas::martingale_lln_check(
        [] { return 1.0; }, 1.0, opt.replicas * 10);
    const bool pass = uniform_report.pass && constant_report.pass &&
                      uniform_report.batch_warnings == 0;
    all_pass = all_pass && pass;
    out["martingale_slope"] = {{"uniform_slope", uniform_report.slope},
                               {"uniform_limit", uniform_report.limit},
                               {"constant_slope", constant_report.slope},
                               {"constant_limit", constant_report.limit},
                               {"batch_warnings", uniform_report.batch_warnings},
                               {"pass", pass}};
  }

  {  // inverse-CDF coupling: excited jump law above the symmetric coin
    const auto upper_law =
        cwl::lemmas::DiscreteLaw::from_jump(cwl::JumpDistribution::epsilon_family(15, 0.01));
    const auto lower_law =
        cwl::lemmas::DiscreteLaw::from_jump(cwl::JumpDistribution::symmetric_coin());
    ordered_json strassen;
    bool pass = true;
    try {
      const auto pair = cwl::lemmas::strassen_pair(
          [&](cwl::u64) { return lower_law; },
          [&](cwl::u64, std::span<const cwl::i64>) { return upper_law; },
          cwl::substream(opt.seed, 3), opt.replicas * 10);
      const double ks_upper = cwl::lemmas::ks_distance(pair.upper, upper_law);
      const double ks_lower = cwl::lemmas::ks_distance(pair.lower, lower_law);
      pass = ks_upper <= 0.02 && ks_lower <= 0.02;
      strassen = {{"indices", pair.upper.size()},
                  {"ks_upper", ks_upper},
                  {"ks_lower", ks_lower},
                  {"dominance_violations", 0},
                  {"pass", pass}};
    } catch (const cwl::lemmas::DominanceViolation& e) {
      pass = false;
      strassen = {{"error", e.what()}, {"pass", false}};
    }
    all_pass = all_pass && pass;
    out["strassen_pair"] = strassen;
  }

  out["all_pass"] = all_pass;
  out["wall_time_s"] = timer.seconds();
  out["version"] = kVersion;
  emit(out.dump(2) + "\n", opt.out);
  return all_pass ? kExitOk : kExitInvariantFailure;
}

int run_sweep(const Options& opt) {
  if (opt.grid) {
    const cwl::JumpDistribution q = resolve_distribution(opt);
    std::ostringstream csv;
    csv << kCsvSchema << "\n";
    csv << "c,ell,delta,classification,condition_lhs,condition_rhs,satisfied\n";
    const int max_jump = q.support_hi();
    for (int c = 3; c <= max_jump; ++c) {
      for (int ell = 3 * c; ell <= max_jump - c + 1; ++ell) {
        const auto report = cwl::ballisticity_condition(q, c, ell);
        csv << c << "," << ell << "," << fmt_double(report.delta) << ","
            << cwl::to_string(report.classification) << "," << fmt_double(report.condition_lhs)
            << "," << fmt_double(report.condition_rhs) << "," << (report.satisfied ? 1 : 0)
            << "\n";
      }
    }
    emit(csv.str(), opt.out);
    return kExitOk;
  }

  if (opt.family.empty()) {
    throw ConfigError("sweep: need --family L=... for an epsilon sweep (or --grid with a distribution)");
  }
  const FamilySpec spec = parse_family(opt.family);
  if (opt.eps_range.empty()) {
    throw ConfigError("sweep: need --eps lo:hi:step");
  }
  double lo = 0.0, hi = 0.0, step = 0.0;
  {
    std::stringstream in(opt.eps_range);
    std::string a, b, s;
    if (!std::getline(in, a, ':') || !std::getline(in, b, ':') || !std::getline(in, s, ':')) {
      throw ConfigError("sweep: --eps expects lo:hi:step");
    }
    lo = std::stod(a);
    hi = std::stod(b);
    step = std::stod(s);
  }
  int c = opt.c;
  int ell = opt.ell;
  if (c == 0 && ell == 0) {
    c = 3;
    ell = spec.max_jump - c + 1;  // largest window still inside the jump range
  }
  if (c < 3 || ell < 3 * c) {
    throw ConfigError("sweep: need c >= 3 and ell >= 3c (give --c/--ell explicitly)");
  }
  const auto rows = cwl::sweep_epsilon(spec.max_jump, c, ell, lo, hi, step);
  std::ostringstream csv;
  csv << kCsvSchema << "\n";
  csv << "L,eps,c,ell,delta,classification,condition_lhs,condition_rhs,satisfied\n";
  for (const auto& row : rows) {
    csv << spec.max_jump << "," << fmt_double(row.eps) << "," << c << "," << ell << ","
        << fmt_double(row.delta) << "," << cwl::to_string(row.classification) << ","
        << fmt_double(row.condition_lhs) << "," << fmt_double(row.condition_rhs) << ","
        << (row.satisfied ? 1 : 0) << "\n";
  }
  emit(csv.str(), opt.out);
  return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"cookie-walk-lab: simulation and verification for long-range excited random walks"};
  app.require_subcommand(1);

  Options opt;
  std::string config_path;
  std::string traj_out;
  int threads = 0;

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON config file (flags override it)");
    sub->add_option("--dist", opt.dist_path, "distribution JSON file");
    sub->add_option("--family", opt.family, "epsilon family, e.g. L=15,eps=0.01");
    sub->add_option("--seed", opt.seed, "master seed");
    sub->add_option("--threads", threads, "parallel width (default: COOKIE_WALK_THREADS or all cores)");
    sub->add_option("--exec", opt.exec, "'openmp' (default) or 'serial'");
    sub->add_option("--out", opt.out, "'csv', 'json', or an output path");
    sub->add_flag("--dump-config", opt.dump_config, "print the resolved config and exit");
    sub->add_option("--level", opt.level, "confidence level (default 0.99)");
  };

  auto* criteria = app.add_subcommand("criteria", "drift, recurrence class, drift condition, frontier");
  add_common(criteria);
  criteria->add_option("--c", opt.c, "mega-vertex width");
  criteria->add_option("--ell", opt.ell, "block spacing");

  auto* simulate = app.add_subcommand("simulate", "one trajectory, optionally written to a file");
  add_common(simulate);
  simulate->add_option("--horizon", opt.horizon, "steps");
  simulate->add_option("--traj-out", traj_out, "write the trajectory record here");

  auto* speed = app.add_subcommand("speed", "renewal and naive speed estimates over replicas");
  add_common(speed);
  speed->add_option("--replicas", opt.replicas, "replica count");
  speed->add_option("--horizon", opt.horizon, "steps per replica");
  speed->add_option("--guard", opt.guard, "no-return guard window (default from the environment)");
  speed->add_option("--c", opt.c, "cross-check: mega-vertex width");
  speed->add_option("--ell", opt.ell, "cross-check: block spacing");

  auto* couple = app.add_subcommand("couple", "mega-vertex coupling verification report");
  add_common(couple);
  couple->add_option("--c", opt.c, "mega-vertex width")->required();
  couple->add_option("--ell", opt.ell, "block spacing")->required();
  couple->add_option("--replicas", opt.replicas, "replica count");
  couple->add_option("--horizon", opt.horizon, "steps per replica");

  auto* lemmas = app.add_subcommand("verify-lemmas", "shared-uniform lemma suites");
  add_common(lemmas);
  lemmas->add_option("--replicas", opt.replicas, "replica count");

  auto* sweep = app.add_subcommand("sweep", "CSV sweep over eps or the (c, ell) grid");
  add_common(sweep);
  sweep->add_option("--eps", opt.eps_range, "epsilon range lo:hi:step");
  sweep->add_option("--c", opt.c, "mega-vertex width");
  sweep->add_option("--ell", opt.ell, "block spacing");
  sweep->add_flag("--grid", opt.grid, "sweep the full (c, ell) grid for the distribution");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfigError;
  }

  try {
    if (!config_path.empty()) {
      // Re-parse so explicit flags override file values.
      Options file_opt;
      load_config_file(config_path, file_opt);
      Options flag_opt = opt;
      opt = file_opt;
      const auto given = [](CLI::App* sub, const char* name) {
        const CLI::Option* option = sub->get_option_no_throw(name);
        return option != nullptr && option->count() > 0;
      };
      for (CLI::App* sub : {criteria, simulate, speed, couple, lemmas, sweep}) {
        if (!sub->parsed()) continue;
        if (given(sub, "--dist")) opt.dist_path = flag_opt.dist_path;
        if (given(sub, "--family")) opt.family = flag_opt.family;
        if (given(sub, "--seed")) opt.seed = flag_opt.seed;
        if (given(sub, "--exec")) opt.exec = flag_opt.exec;
        if (given(sub, "--out")) opt.out = flag_opt.out;
        if (given(sub, "--level")) opt.level = flag_opt.level;
        if (given(sub, "--replicas")) opt.replicas = flag_opt.replicas;
        if (given(sub, "--horizon")) opt.horizon = flag_opt.horizon;
        if (given(sub, "--guard")) opt.guard = flag_opt.guard;
        if (given(sub, "--c")) opt.c = flag_opt.c;
        if (given(sub, "--ell")) opt.ell = flag_opt.ell;
        if (given(sub, "--eps")) opt.eps_range = flag_opt.eps_range;
        if (given(sub, "--grid")) opt.grid = flag_opt.grid;
        if (given(sub, "--dump-config")) opt.dump_config = flag_opt.dump_config;
      }
    }

#ifdef _OPENMP
    if (threads > 0) {
      omp_set_num_threads(threads);
    } else if (const char* env_threads = std::getenv("COOKIE_WALK_THREADS")) {
      const int n = std::atoi(env_threads);
      if (n > 0) {
        omp_set_num_threads(n);
      }
    }
#endif

    if (opt.dump_config) {
      std::cout << config_echo(opt).dump(2) << "\n";
      return kExitOk;
    }

    if (criteria->parsed()) return run_criteria(opt);
    if (simulate->parsed()) return run_simulate(opt, traj_out);
    if (speed->parsed()) return run_speed(opt);
    if (couple->parsed()) return run_couple(opt);
    if (lemmas->parsed()) return run_verify_lemmas(opt);
    if (sweep->parsed()) return run_sweep(opt);
    return kExitConfigError;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvariantFailure;
  }
}

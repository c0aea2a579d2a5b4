// Throughput comparison of the serial reference kernels against the OpenMP
// replica kernels, on the workloads the experiment runner actually uses.

#include "cwl/ensemble.hpp"
#include "cwl/rng.hpp"

#include <chrono>
#include <iostream>

namespace {

double time_seconds(const std::function<void()>& fn) {
  const auto start = std::chrono::steady_clock::now();
  fn();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void report(const char* name, double serial_s, double parallel_s, double work_units) {
  std::cout << name << ": serial " << serial_s << " s (" << work_units / serial_s
            << " steps/s), openmp " << parallel_s << " s (" << work_units / parallel_s
            << " steps/s), speedup " << serial_s / parallel_s << "x\n";
}

} // namespace

int main() {
  std::cout << "threads available: " << cwl::hardware_width() << "\n";

  const cwl::JumpDistribution q = cwl::JumpDistribution::epsilon_family(15, 0.01);
  const cwl::CookieEnvironment env = cwl::CookieEnvironment::single(q);

  {
    cwl::SpeedRunConfig cfg;
    cfg.replicas = 16;
    cfg.horizon = 200000;
    cfg.seed = 2024;
    cwl::SpeedEnsemble serial_result, parallel_result;
    const double serial_s =
        time_seconds([&] { serial_result = cwl::run_speed_ensemble(env, cfg, cwl::ExecMode::serial); });
    const double parallel_s = time_seconds(
        [&] { parallel_result = cwl::run_speed_ensemble(env, cfg, cwl::ExecMode::openmp); });
    const bool same = serial_result.naive_mean == parallel_result.naive_mean &&
                      serial_result.renewal_pooled == parallel_result.renewal_pooled;
    report("speed ensemble  ", serial_s, parallel_s,
           static_cast<double>(cfg.replicas) * static_cast<double>(cfg.horizon));
    std::cout << "  results identical: " << (same ? "yes" : "NO") << "\n";
  }

  {
    const cwl::MegaVertexConfig mega(3, 13);
    cwl::CouplingRunConfig cfg;
    cfg.replicas = 8;
    cfg.horizon = 200000;
    cfg.seed = 2024;
    cwl::CouplingEnsemble serial_result, parallel_result;
    const double serial_s = time_seconds(
        [&] { serial_result = cwl::run_coupling_ensemble(q, mega, cfg, cwl::ExecMode::serial); });
    const double parallel_s = time_seconds(
        [&] { parallel_result = cwl::run_coupling_ensemble(q, mega, cfg, cwl::ExecMode::openmp); });
    const bool same = serial_result.completed == parallel_result.completed &&
                      serial_result.cookie.plus == parallel_result.cookie.plus;
    report("coupling scan   ", serial_s, parallel_s,
           static_cast<double>(cfg.replicas) * static_cast<double>(cfg.horizon));
    std::cout << "  results identical: " << (same ? "yes" : "NO") << "\n";
  }

  {
    const cwl::MegaArrowLaw law = cwl::mega_arrow_law(q, cwl::MegaVertexConfig(3, 13));
    cwl::MWalkRunConfig cfg;
    cfg.replicas = 32;
    cfg.horizon = 1000000;
    cfg.seed = 2024;
    cwl::MWalkEnsemble serial_result, parallel_result;
    const double serial_s = time_seconds(
        [&] { serial_result = cwl::run_mwalk_ensemble(law, cfg, cwl::ExecMode::serial); });
    const double parallel_s = time_seconds(
        [&] { parallel_result = cwl::run_mwalk_ensemble(law, cfg, cwl::ExecMode::openmp); });
    const bool same = serial_result.mean == parallel_result.mean;
    report("coarse walk     ", serial_s, parallel_s,
           static_cast<double>(cfg.replicas) * static_cast<double>(cfg.horizon));
    std::cout << "  results identical: " << (same ? "yes" : "NO") << "\n";
  }

  return 0;
}

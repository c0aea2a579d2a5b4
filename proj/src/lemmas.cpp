#include "cwl/lemmas.hpp"

#include <algorithm>

namespace cwl::lemmas {

BlockBound geometric_block_bound(u64 seed, u64 stream, i64 a, i64 b, i64 start, i64 horizon) {
  if (a >= b) {
    throw std::invalid_argument("geometric_block_bound: need a < b");
  }
  BlockBound out;
  const i64 width = b - a;
  UniformSource uniforms(seed, stream);

  i64 pos = start;
  out.exit_time = 0;
  if (pos > a && pos < b) {
    out.exit_time = -1;
    for (i64 t = 0; t < horizon; ++t) {
      pos += coin(uniforms.at(static_cast<u64>(t)));
      if (pos <= a || pos >= b) {
        out.exit_time = t + 1;
        break;
      }
    }
  }

  out.g = -1;
  const i64 max_blocks = horizon / width + 1;
  for (i64 n = 1; n <= max_blocks; ++n) {
    bool all_low = true;
    for (i64 i = (n - 1) * width; i < n * width; ++i) {
      if (uniforms.at(static_cast<u64>(i)) >= 0.5) {
        all_low = false;
        break;
      }
    }
    if (all_low) {
      out.g = n;
      break;
    }
  }
  out.found_g = out.g > 0;
  out.holds = out.exit_time >= 0 && out.found_g && out.exit_time <= out.g * width;
  return out;
}

SlopeReport martingale_lln_check(const std::function<double()>& xi, double k_bound, u64 n_max,
                                 u64 batch) {
  SlopeReport report;
  report.n = n_max;
  double running = 0.0;
  double batch_sq = 0.0, batch_fourth = 0.0;
  u64 in_batch = 0;
  for (u64 n = 0; n < n_max; ++n) {
    const double x = xi();
    running += x;
    batch_sq += x * x;
    batch_fourth += x * x * x * x;
    ++in_batch;
    if (in_batch == batch || n + 1 == n_max) {
      const double m2 = batch_sq / static_cast<double>(in_batch);
      report.max_batch_m2 = std::max(report.max_batch_m2, m2);
      if (in_batch > 1) {
        const double var =
            (batch_fourth - batch_sq * batch_sq / static_cast<double>(in_batch)) /
            static_cast<double>(in_batch - 1);
        const double se = std::sqrt(std::max(0.0, var) / static_cast<double>(in_batch));
        if (m2 > k_bound * k_bound + 5.0 * se) {
          ++report.batch_warnings;
        }
      }
      batch_sq = batch_fourth = 0.0;
      in_batch = 0;
    }
  }
  report.slope = running / static_cast<double>(n_max);
  report.limit = k_bound + 3.0 * k_bound / std::sqrt(static_cast<double>(n_max));
  report.pass = report.slope <= report.limit;
  return report;
}

i64 DiscreteLaw::quantile(double u) const {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (cdf[i] >= u) {
      return values[i];
    }
  }
  return values.back();
}

double DiscreteLaw::cdf_at(i64 x) const {
  double f = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] <= x) {
      f = cdf[i];
    } else {
      break;
    }
  }
  return f;
}

DiscreteLaw DiscreteLaw::from_jump(const JumpDistribution& q) {
  DiscreteLaw law;
  double cum = 0.0;
  for (int k = q.window_lo(); k <= q.window_hi(); ++k) {
    const double p = q.prob(k);
    if (p > 0.0) {
      cum += p;
      law.values.push_back(k);
      law.cdf.push_back(cum);
    }
  }
  law.cdf.back() = 1.0;
  return law;
}

DiscreteLaw DiscreteLaw::shifted(const DiscreteLaw& base, i64 offset) {
  DiscreteLaw law = base;
  for (i64& v : law.values) {
    v += offset;
  }
  return law;
}

StrassenPair strassen_pair(
    const std::function<DiscreteLaw(u64)>& g_law,
    const std::function<DiscreteLaw(u64, std::span<const i64>)>& conditional_law, u64 seed,
    u64 n) {
  StrassenPair out;
  out.upper.reserve(n);
  out.lower.reserve(n);
  for (u64 i = 0; i < n; ++i) {
    const double u = uniform_at(seed, 0, i);
    const DiscreteLaw g = g_law(i);
    const DiscreteLaw f = conditional_law(i, out.upper);
    const i64 x = f.quantile(u);
    const i64 y = g.quantile(u);
    if (x < y) {
      throw DominanceViolation(i, x, y);
    }
    out.upper.push_back(x);
    out.lower.push_back(y);
  }
  return out;
}

double ks_distance(std::span<const i64> sample, const DiscreteLaw& law) {
  std::vector<i64> sorted(sample.begin(), sample.end());
  std::sort(sorted.begin(), sorted.end());
  double worst = 0.0;
  for (std::size_t i = 0; i < law.values.size(); ++i) {
    const i64 v = law.values[i];
    const auto upper = std::upper_bound(sorted.begin(), sorted.end(), v);
    const double empirical =
        static_cast<double>(upper - sorted.begin()) / static_cast<double>(sorted.size());
    worst = std::max(worst, std::abs(empirical - law.cdf[i]));
  }
  return worst;
}

} // namespace cwl::lemmas

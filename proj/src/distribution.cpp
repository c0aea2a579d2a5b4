#include "cwl/distribution.hpp"

#include "cwl/rng.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace cwl {

JumpDistribution::JumpDistribution(const std::map<int, double>& probs) {
  if (probs.empty()) {
    throw std::invalid_argument("jump distribution: empty probability map");
  }
  k_lo_ = probs.begin()->first;
  const int k_hi = probs.rbegin()->first;
  probs_.assign(static_cast<std::size_t>(k_hi - k_lo_) + 1, 0.0);
  double total = 0.0;
  for (const auto& [k, p] : probs) {
    if (!std::isfinite(p) || p < 0.0) {
      throw std::invalid_argument("jump distribution: probabilities must be finite and >= 0");
    }
    probs_[static_cast<std::size_t>(k - k_lo_)] = p;
    total += p;
  }
  if (total <= 0.0) {
    throw std::invalid_argument("jump distribution: total mass must be positive");
  }
  for (double& p : probs_) {
    p /= total;
  }

  sup_lo_ = 0;
  sup_hi_ = 0;
  support_size_ = 0;
  bool seen = false;
  for (std::size_t i = 0; i < probs_.size(); ++i) {
    if (probs_[i] > 0.0) {
      const int k = k_lo_ + static_cast<int>(i);
      if (!seen) {
        sup_lo_ = k;
        seen = true;
      }
      sup_hi_ = k;
      ++support_size_;
    }
  }

  // Suffix sums, accumulated from the top so each tail adds the smallest
  // remaining terms first.
  tails_.assign(probs_.size() + 1, 0.0);
  for (std::size_t i = probs_.size(); i-- > 0;) {
    tails_[i] = tails_[i + 1] + probs_[i];
  }

  // Mean summed by ascending magnitude to limit cancellation.
  std::vector<double> terms;
  terms.reserve(probs_.size());
  for (std::size_t i = 0; i < probs_.size(); ++i) {
    terms.push_back(static_cast<double>(k_lo_ + static_cast<int>(i)) * probs_[i]);
  }
  std::sort(terms.begin(), terms.end(),
            [](double a, double b) { return std::abs(a) < std::abs(b); });
  mean_ = 0.0;
  for (double t : terms) {
    mean_ += t;
  }
}

JumpDistribution JumpDistribution::epsilon_family(int max_jump, double eps) {
  if (max_jump < 1 || eps < 0.0 || eps > 1.0) {
    throw std::invalid_argument("epsilon family: need max_jump >= 1 and eps in [0, 1]");
  }
  return JumpDistribution({{-1, eps}, {max_jump, 1.0 - eps}});
}

JumpDistribution JumpDistribution::symmetric_coin() {
  return JumpDistribution({{-1, 0.5}, {1, 0.5}});
}

JumpDistribution JumpDistribution::from_json_text(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  if (!j.contains("support") || !j.contains("probs")) {
    throw std::invalid_argument("distribution json: need \"support\" and \"probs\" arrays");
  }
  const auto& support = j.at("support");
  const auto& probs = j.at("probs");
  if (!support.is_array() || !probs.is_array() || support.size() != probs.size() ||
      support.empty()) {
    throw std::invalid_argument("distribution json: support/probs must be equal-length arrays");
  }
  std::map<int, double> m;
  for (std::size_t i = 0; i < support.size(); ++i) {
    const int k = support[i].get<int>();
    if (m.count(k)) {
      throw std::invalid_argument("distribution json: duplicate support point");
    }
    m[k] = probs[i].get<double>();
  }
  return JumpDistribution(m);
}

double JumpDistribution::prob(int k) const {
  if (k < k_lo_ || k > window_hi()) {
    return 0.0;
  }
  return probs_[static_cast<std::size_t>(k - k_lo_)];
}

double JumpDistribution::tail(int j) const {
  if (j <= k_lo_) {
    return 1.0;
  }
  if (j > window_hi()) {
    return 0.0;
  }
  return tails_[static_cast<std::size_t>(j - k_lo_)];
}

int JumpDistribution::sample(double u) const {
  int i = static_cast<int>(probs_.size()) - 1;
  while (i > 0 && tails_[static_cast<std::size_t>(i)] < u) {
    --i;
  }
  return k_lo_ + i;
}

std::string JumpDistribution::to_json_text() const {
  nlohmann::json support = nlohmann::json::array();
  nlohmann::json probs = nlohmann::json::array();
  for (std::size_t i = 0; i < probs_.size(); ++i) {
    if (probs_[i] > 0.0) {
      support.push_back(k_lo_ + static_cast<int>(i));
      probs.push_back(probs_[i]);
    }
  }
  nlohmann::json out;
  out["support"] = support;
  out["probs"] = probs;
  return out.dump();
}

u64 JumpDistribution::hash() const {
  u64 h = fnv1a64(&k_lo_, sizeof(k_lo_));
  h = fnv1a64(probs_.data(), probs_.size() * sizeof(double), h);
  return h;
}

CookieEnvironment::CookieEnvironment(std::vector<JumpDistribution> excited_laws)
    : laws_(std::move(excited_laws)) {
  if (laws_.empty()) {
    throw std::invalid_argument("cookie environment: need at least one excited law");
  }
}

CookieEnvironment CookieEnvironment::single(JumpDistribution q) {
  std::vector<JumpDistribution> laws;
  laws.push_back(std::move(q));
  return CookieEnvironment(std::move(laws));
}

const JumpDistribution& CookieEnvironment::law(int i) const {
  if (i < 1 || i > cookies_per_vertex()) {
    throw std::out_of_range("cookie environment: law index out of range");
  }
  return laws_[static_cast<std::size_t>(i - 1)];
}

int CookieEnvironment::max_jump() const {
  int hi = laws_.front().support_hi();
  for (const auto& q : laws_) {
    hi = std::max(hi, q.support_hi());
  }
  return hi;
}

bool CookieEnvironment::common_support() const {
  std::set<int> first;
  for (int k = laws_.front().support_lo(); k <= laws_.front().support_hi(); ++k) {
    if (laws_.front().prob(k) > 0.0) {
      first.insert(k);
    }
  }
  for (const auto& q : laws_) {
    std::set<int> s;
    for (int k = q.support_lo(); k <= q.support_hi(); ++k) {
      if (q.prob(k) > 0.0) {
        s.insert(k);
      }
    }
    if (s != first) {
      return false;
    }
  }
  return true;
}

u64 CookieEnvironment::hash() const {
  u64 h = 0xC00C1E5ull;
  const int c = cookies_per_vertex();
  h = fnv1a64(&c, sizeof(c), h);
  for (const auto& q : laws_) {
    const u64 qh = q.hash();
    h = fnv1a64(&qh, sizeof(qh), h);
  }
  return h;
}

} // namespace cwl

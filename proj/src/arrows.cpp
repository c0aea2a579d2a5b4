#include "cwl/arrows.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace cwl {

std::int8_t ArrowSystem::at(i64 j, i64 k) const {
  if (k < 1) {
    throw std::out_of_range("arrow system: stack index starts at 1");
  }
  const auto it = stacks_.find(j);
  if (it == stacks_.end() || k > static_cast<i64>(it->second.size())) {
    return +1;
  }
  return it->second[static_cast<std::size_t>(k - 1)];
}

void ArrowSystem::set(i64 j, i64 k, std::int8_t v) {
  if (k < 1) {
    throw std::out_of_range("arrow system: stack index starts at 1");
  }
  if (v != 1 && v != -1) {
    throw std::invalid_argument("arrow system: arrows are +1 or -1");
  }
  auto& stack = stacks_[j];
  if (static_cast<i64>(stack.size()) < k) {
    stack.resize(static_cast<std::size_t>(k), +1);
  }
  stack[static_cast<std::size_t>(k - 1)] = v;
}

void ArrowSystem::append(i64 j, std::int8_t v) {
  if (v != 1 && v != -1) {
    throw std::invalid_argument("arrow system: arrows are +1 or -1");
  }
  stacks_[j].push_back(v);
}

i64 ArrowSystem::stack_size(i64 j) const {
  const auto it = stacks_.find(j);
  return it == stacks_.end() ? 0 : static_cast<i64>(it->second.size());
}

i64 ArrowSystem::materialized_arrows() const {
  i64 n = 0;
  for (const auto& [j, stack] : stacks_) {
    n += static_cast<i64>(stack.size());
  }
  return n;
}

std::string ArrowSystem::dump() const {
  std::vector<i64> keys;
  keys.reserve(stacks_.size());
  for (const auto& [j, stack] : stacks_) {
    keys.push_back(j);
  }
  std::sort(keys.begin(), keys.end());
  std::ostringstream out;
  for (i64 j : keys) {
    const auto& stack = stacks_.at(j);
    for (std::size_t k = 0; k < stack.size(); ++k) {
      out << j << ' ' << (k + 1) << ' ' << static_cast<int>(stack[k]) << '\n';
    }
  }
  return out.str();
}

ArrowSystem ArrowSystem::parse_dump(const std::string& text) {
  ArrowSystem out;
  std::istringstream in(text);
  i64 j = 0, k = 0;
  int v = 0;
  while (in >> j >> k >> v) {
    out.set(j, k, static_cast<std::int8_t>(v));
  }
  return out;
}

std::vector<i64> walk_from_arrows(const ArrowSystem& arrows, i64 horizon) {
  return walk_from_arrow_fn([&](i64 j, i64 k) { return arrows.at(j, k); }, horizon);
}

ArrowSystem extract_arrows(std::span<const i64> path) {
  ArrowSystem out;
  for (std::size_t t = 0; t + 1 < path.size(); ++t) {
    const i64 d = path[t + 1] - path[t];
    if (d != 1 && d != -1) {
      throw std::invalid_argument("extract_arrows: path must move by +-1");
    }
    out.append(path[t], static_cast<std::int8_t>(d));
  }
  return out;
}

bool dominates(const ArrowSystem& e, const ArrowSystem& e_prime, i64 j_lo, i64 j_hi, i64 depth) {
  for (i64 j = j_lo; j <= j_hi; ++j) {
    i64 sum = 0, sum_prime = 0;
    for (i64 k = 1; k <= depth; ++k) {
      sum += e.at(j, k);
      sum_prime += e_prime.at(j, k);
      if (sum < sum_prime) {
        return false;
      }
    }
  }
  return true;
}

bool dominates_materialized(const ArrowSystem& e, const ArrowSystem& e_prime) {
  const auto check_vertex = [&](i64 j) {
    const i64 depth = std::max(e.stack_size(j), e_prime.stack_size(j));
    i64 sum = 0, sum_prime = 0;
    for (i64 k = 1; k <= depth; ++k) {
      sum += e.at(j, k);
      sum_prime += e_prime.at(j, k);
      if (sum < sum_prime) {
        return false;
      }
    }
    return true;
  };
  for (const auto& [j, stack] : e.stacks()) {
    if (!check_vertex(j)) {
      return false;
    }
  }
  for (const auto& [j, stack] : e_prime.stacks()) {
    if (!e.stacks().count(j) && !check_vertex(j)) {
      return false;
    }
  }
  return true;
}

} // namespace cwl

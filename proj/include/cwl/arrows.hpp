#pragma once

#include "cwl/common.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace cwl {

// Per-vertex stacks of +-1 arrows. Only touched prefixes are materialized;
// everything beyond them reads as +1, which keeps an infinite array of
// mostly-untouched stacks at O(path length) memory.
class ArrowSystem {
public:
  std::int8_t at(i64 j, i64 k) const;  // k >= 1
  void set(i64 j, i64 k, std::int8_t v);
  void append(i64 j, std::int8_t v);
  i64 stack_size(i64 j) const;
  i64 materialized_arrows() const;

  const std::unordered_map<i64, std::vector<std::int8_t>>& stacks() const { return stacks_; }

  // One "j k v" line per materialized arrow, sorted by (j, k).
  std::string dump() const;
  static ArrowSystem parse_dump(const std::string& text);

  bool operator==(const ArrowSystem& other) const { return stacks_ == other.stacks_; }

private:
  std::unordered_map<i64, std::vector<std::int8_t>> stacks_;
};

// Visit counts of the generated walk; `current` is the count at the walk's
// position including the present time.
struct LocalTimeLedger {
  std::unordered_map<i64, i64> counts;
  i64 current = 0;
};

// Strong pointwise construction: X_0 = 0 and X_{t+1} = X_t + E(X_t, M_t),
// where M_t counts the visits to X_t including time t.
std::vector<i64> walk_from_arrows(const ArrowSystem& arrows, i64 horizon);

// Same recursion with arrows produced on demand; fn(j, k) must be pure.
template <class Fn>
std::vector<i64> walk_from_arrow_fn(Fn&& fn, i64 horizon) {
  std::vector<i64> path;
  path.reserve(static_cast<std::size_t>(horizon) + 1);
  path.push_back(0);
  LocalTimeLedger ledger;
  i64 pos = 0;
  ledger.current = ++ledger.counts[pos];
  for (i64 t = 0; t < horizon; ++t) {
    const std::int8_t arrow = fn(pos, ledger.current);
    pos += arrow > 0 ? 1 : -1;
    path.push_back(pos);
    ledger.current = ++ledger.counts[pos];
  }
  return path;
}

// E(j, k) = direction of the k-th departure from j. Throws on increments
// other than +-1.
ArrowSystem extract_arrows(std::span<const i64> path);

// Prefix-sum order: sum_{k<=m} E(j,k) >= sum_{k<=m} E'(j,k) on the window,
// with +1 defaults beyond the materialized prefixes.
bool dominates(const ArrowSystem& e, const ArrowSystem& e_prime, i64 j_lo, i64 j_hi, i64 depth);

// Same check over every vertex either system materializes, deep enough that
// the all-default tails cannot flip the answer.
bool dominates_materialized(const ArrowSystem& e, const ArrowSystem& e_prime);

} // namespace cwl

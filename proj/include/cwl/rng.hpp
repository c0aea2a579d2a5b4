#pragma once

#include "cwl/common.hpp"

#include <array>
#include <cstddef>

namespace cwl {

// Counter-based generator (Philox 4x32-10). Every output is a pure function
// of (key, counter), so streams can be split across replicas and replayed
// from any offset without shared state.
struct Philox4x32 {
  static std::array<std::uint32_t, 4> block(u64 key, u64 ctr_hi, u64 ctr_lo) noexcept;
};

// Returns a uniform strictly inside (0, 1) for the given (seed, stream, step).
double uniform_at(u64 seed, u64 stream, u64 step) noexcept;

// Uniform (0,1) stream keyed by (seed, stream). The t-th output depends only
// on the key and t.
class UniformSource {
public:
  explicit UniformSource(u64 seed, u64 stream = 0, u64 start = 0) noexcept
      : seed_(seed), stream_(stream), counter_(start) {}

  double next() noexcept { return uniform_at(seed_, stream_, counter_++); }
  double at(u64 t) const noexcept { return uniform_at(seed_, stream_, t); }

  u64 counter() const noexcept { return counter_; }
  u64 seed() const noexcept { return seed_; }
  u64 stream() const noexcept { return stream_; }

private:
  u64 seed_;
  u64 stream_;
  u64 counter_;
};

// Maps signed ids (vertex indices) into the unsigned stream key space.
constexpr u64 zigzag64(i64 v) noexcept {
  return (static_cast<u64>(v) << 1) ^ static_cast<u64>(v >> 63);
}

// Derives an independent sub-seed, e.g. one per replica.
u64 substream(u64 seed, u64 id) noexcept;

u64 fnv1a64(const void* data, std::size_t n, u64 h = 14695981039346656037ull) noexcept;

} // namespace cwl

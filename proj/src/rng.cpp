#include "cwl/rng.hpp"

namespace cwl {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline u64 splitmix_round(u64 z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

} // namespace

std::array<std::uint32_t, 4> Philox4x32::block(u64 key, u64 ctr_hi, u64 ctr_lo) noexcept {
  std::uint32_t k0 = static_cast<std::uint32_t>(key);
  std::uint32_t k1 = static_cast<std::uint32_t>(key >> 32);
  std::uint32_t c0 = static_cast<std::uint32_t>(ctr_lo);
  std::uint32_t c1 = static_cast<std::uint32_t>(ctr_lo >> 32);
  std::uint32_t c2 = static_cast<std::uint32_t>(ctr_hi);
  std::uint32_t c3 = static_cast<std::uint32_t>(ctr_hi >> 32);
  for (int round = 0; round < 10; ++round) {
    const u64 p0 = static_cast<u64>(kMul0) * c0;
    const u64 p1 = static_cast<u64>(kMul1) * c2;
    const std::uint32_t n0 = static_cast<std::uint32_t>(p1 >> 32) ^ c1 ^ k0;
    const std::uint32_t n1 = static_cast<std::uint32_t>(p1);
    const std::uint32_t n2 = static_cast<std::uint32_t>(p0 >> 32) ^ c3 ^ k1;
    const std::uint32_t n3 = static_cast<std::uint32_t>(p0);
    c0 = n0;
    c1 = n1;
    c2 = n2;
    c3 = n3;
    k0 += kWeyl0;
    k1 += kWeyl1;
  }
  return {c0, c1, c2, c3};
}

double uniform_at(u64 seed, u64 stream, u64 step) noexcept {
  const auto w = Philox4x32::block(seed, stream, step);
  const u64 bits = static_cast<u64>(w[0]) | (static_cast<u64>(w[1]) << 32);
  // 53 mantissa bits, offset by half an ulp so 0 and 1 are never produced.
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

u64 substream(u64 seed, u64 id) noexcept {
  return splitmix_round(seed ^ splitmix_round(id + 0x9E3779B97F4A7C15ull));
}

u64 fnv1a64(const void* data, std::size_t n, u64 h) noexcept {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 1099511628211ull;
  }
  return h;
}

} // namespace cwl

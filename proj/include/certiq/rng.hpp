#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "certiq/hash.hpp"

namespace certiq {

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Counter-based random stream. The key is derived from
/// (global seed, purpose, indices...), so any stream can be rebuilt from its
/// coordinates without touching shared state; draws are splitmix64 of
/// (key, counter).
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : key_(splitmix64(seed)) {}

  /// Child stream for the given purpose tag; independent of this stream's
  /// counter.
  RngStream fork(std::string_view purpose) const {
    return RngStream(key_, fnv1a64(purpose));
  }
  RngStream fork(std::uint64_t index) const {
    return RngStream(key_, splitmix64(index ^ 0x5851f42d4c957f2dULL));
  }

  std::uint64_t key() const { return key_; }
  std::uint64_t counter() const { return counter_; }

  std::uint64_t next_u64() {
    return splitmix64(key_ ^ splitmix64(counter_++));
  }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [lo, hi] (inclusive).
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

  /// Standard normal via Box-Muller; consumes two uniforms per pair.
  double normal();

  void fill_normal(std::span<double> out) {
    for (auto& v : out) v = normal();
  }
  std::vector<double> normal_vector(std::size_t n) {
    std::vector<double> v(n);
    fill_normal(v);
    return v;
  }

 private:
  RngStream(std::uint64_t parent, std::uint64_t salt)
      : key_(splitmix64(parent ^ splitmix64(salt))) {}

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace certiq

#pragma once

#include <cstdint>
#include <numbers>

namespace pnpqkd {

// Deterministic counter-derived random stream (splitmix64 core).
//
// Every consumer derives its own stream from a master seed through
// child(key) chains, e.g. trial t of a session uses
// RngStream(seed).child(t). Derivation depends only on the parent's
// seed, never on how much the parent has been consumed, so sharding a
// trial range across workers reproduces the single-worker results
// bit for bit.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : seed_(seed), state_(seed) {}

  std::uint64_t next_u64() {
    // splitmix64 (Steele, Lea, Flood)
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1), 53-bit resolution.
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform phase in [0, 2*pi).
  double next_phase() { return next_unit() * 2.0 * std::numbers::pi; }

  bool next_bernoulli(double p) {
    if (p <= 0.0) return false;
    if (p >= 1.0) return true;
    return next_unit() < p;
  }

  std::uint64_t base_seed() const { return seed_; }

  /// Independent sub-stream keyed on `key`; pure in (seed, key).
  RngStream child(std::uint64_t key) const {
    std::uint64_t s = seed_ ^ (key + 0x9e3779b97f4a7c15ULL + (seed_ << 6) + (seed_ >> 2));
    s += 0x9e3779b97f4a7c15ULL;
    s = (s ^ (s >> 30)) * 0xbf58476d1ce4e5b9ULL;
    s = (s ^ (s >> 27)) * 0x94d049bb133111ebULL;
    return RngStream(s ^ (s >> 31));
  }

 private:
  std::uint64_t seed_;
  std::uint64_t state_;
};

}  // namespace pnpqkd

#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace pdpp {

/// Seeded generator with platform-independent derived draws.
///
/// std::uniform_*_distribution and std::shuffle are implementation-defined,
/// so uniform reals and shuffles are derived here from raw mt19937_64 output.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [0, n); n > 0.
  std::uint64_t below(std::uint64_t n);

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  /// Textual engine state (the standard stream format of mt19937_64).
  std::string state() const;
  void set_state(std::string_view text);

 private:
  std::mt19937_64 engine_;
};

/// SplitMix64 finalizer; used to derive independent streams from keys.
std::uint64_t mix64(std::uint64_t x);
/// FNV-1a over bytes.
std::uint64_t hash_bytes(std::string_view bytes);

}  // namespace pdpp

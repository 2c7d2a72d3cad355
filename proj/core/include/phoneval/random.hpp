#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace phoneval {

/// Seeded generator with a platform-independent output sequence.
/// std::mt19937_64 is fully specified by the standard; the distributions below are
/// implemented here because the std:: ones are implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11U) * 0x1.0p-53; }

  /// Standard normal via Box-Muller.
  double gaussian();

  /// +1 or -1 with equal probability.
  double sign() { return (engine_() >> 63U) != 0 ? 1.0 : -1.0; }

  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Stable 64-bit seed derived from a parent seed and a tag (first 8 bytes of a SHA-256).
std::uint64_t derive_seed(std::uint64_t parent, std::string_view tag);

}  // namespace phoneval

#pragma once

#include <cstdint>
#include <random>

namespace nidreg {

/// SplitMix64 finalizer; decorrelates consecutive seeds.
[[nodiscard]] std::uint64_t mix_seed(std::uint64_t x) noexcept;

/// Seed of replication `index` under base seed `seed`.
[[nodiscard]] inline std::uint64_t replication_seed(std::uint64_t seed, std::uint64_t index) noexcept {
  return seed + index;
}

/// 64-bit Mersenne twister with an explicit seed. Each Monte Carlo task owns
/// one instance so results never depend on scheduling.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(mix_seed(seed)) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double normal() { return normal_(engine_); }
  std::uint64_t bits() noexcept { return engine_(); }

private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace nidreg

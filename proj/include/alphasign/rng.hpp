#pragma once

#include <cstdint>
#include <random>

namespace alphasign {

/// One mixing round of the splitmix64 output function.
std::uint64_t splitmix64_mix(std::uint64_t x);

/// Deterministic per-replication seed: distinct indices always map to
/// distinct seeds for a fixed master.
std::uint64_t child_seed(std::uint64_t master, std::uint64_t index);

/// Deterministic generator with explicit uniform and normal draws so that
/// streams are reproducible across platforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Standard normal via Box-Muller; draws come in cached pairs.
  double normal();
  /// Chi-squared with k degrees of freedom as a sum of squared normals.
  double chi_squared(int k);

 private:
  std::mt19937_64 gen_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace alphasign

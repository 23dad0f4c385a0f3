#include "alphasign/rng.hpp"

#include <cmath>

namespace alphasign {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
}

std::uint64_t splitmix64_mix(std::uint64_t x) {
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t child_seed(std::uint64_t master, std::uint64_t index) {
  // Counter advance then mix; the map index -> seed is injective for a
  // fixed master because the increment is odd.
  return splitmix64_mix(master + (index + 1) * kGolden);
}

double Rng::uniform() {
  return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = 1.0 - uniform();  // (0, 1], keeps the log finite
  double u2 = uniform();
  double radius = std::sqrt(-2.0 * std::log(u1));
  double angle = 6.283185307179586 * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

double Rng::chi_squared(int k) {
  double sum = 0.0;
  for (int i = 0; i < k; ++i) {
    double z = normal();
    sum += z * z;
  }
  return sum;
}

}  // namespace alphasign

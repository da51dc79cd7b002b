#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>

namespace bulge {

// Deterministic random stream for Monte-Carlo propagation. mt19937_64 output
// is pinned by the standard and the mappings below avoid std::*_distribution,
// whose sequences vary between standard libraries, so a seed reproduces the
// same draws everywhere.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : rng_(seed) {}

  // Uniform in [0, 1) with 53-bit resolution.
  double uniform() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal via Box-Muller; consumes two uniforms per pair.
  double gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    constexpr double two_pi = 6.283185307179586476925286766559;
    spare_ = radius * std::sin(two_pi * u2);
    has_spare_ = true;
    return radius * std::cos(two_pi * u2);
  }

  // Gaussian truncated at +-n_sigma and (optionally) at zero from below.
  // nullopt when 100 attempts fail, which only happens when the positivity
  // constraint cuts away essentially the whole distribution.
  std::optional<double> truncated_gaussian(double mean, double sigma, double n_sigma,
                                           bool require_positive) {
    if (sigma == 0.0) {
      if (require_positive && mean <= 0.0) return std::nullopt;
      return mean;
    }
    for (int attempt = 0; attempt < 100; ++attempt) {
      const double g = gaussian();
      if (std::abs(g) > n_sigma) continue;
      const double x = mean + sigma * g;
      if (require_positive && x <= 0.0) continue;
      return x;
    }
    return std::nullopt;
  }

 private:
  std::mt19937_64 rng_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace bulge

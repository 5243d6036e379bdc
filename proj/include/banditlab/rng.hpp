#pragma once

#include <cmath>
#include <cstdint>

namespace banditlab {

// Counter-based splittable RNG. Every trial gets an independent stream derived
// from (master_seed, trial_index), so results do not depend on how trials are
// scheduled across threads. Gaussians use explicit Box-Muller instead of
// std::normal_distribution, whose output is implementation-defined; this keeps
// byte-identical reproducibility a property of the code, not of the platform.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

inline std::uint64_t mix_seed(std::uint64_t master_seed,
                              std::uint64_t trial_index) {
  SplitMix64 g(master_seed ^ (0x9E3779B97F4A7C15ULL * (trial_index + 1)));
  g.next();
  return g.next();
}

class TrialRng {
 public:
  TrialRng(std::uint64_t master_seed, std::uint64_t trial_index)
      : gen_(mix_seed(master_seed, trial_index)) {}

  explicit TrialRng(std::uint64_t seed) : gen_(seed) {}

  // Uniform in [0, 1) with 53 random bits.
  double uniform01() {
    return static_cast<double>(gen_.next() >> 11) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller; the paired draw is cached.
  double gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    do {
      u1 = uniform01();
    } while (u1 <= 0.0);
    const double u2 = uniform01();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * M_PI * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

  std::uint64_t next_u64() { return gen_.next(); }

  // Uniform integer in [0, bound) by rejection; bound must be positive.
  std::uint64_t next_below(std::uint64_t bound) {
    const std::uint64_t limit = bound * (UINT64_MAX / bound);
    std::uint64_t x = 0;
    do {
      x = gen_.next();
    } while (x >= limit);
    return x % bound;
  }

 private:
  SplitMix64 gen_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace banditlab

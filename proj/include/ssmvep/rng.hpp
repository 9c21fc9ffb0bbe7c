#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace ssmvep {

// splitmix64 finalizer. Used to derive independent sub-stream seeds from a
// master seed so datasets are reproducible regardless of generation order.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Seed for trial `trial_index` of class `class_index`:
//   mix64(mix64(master + GOLDEN * (class + 1)) + trial + 1)
inline std::uint64_t trial_seed(std::uint64_t master_seed, std::uint64_t class_index,
                                std::uint64_t trial_index) {
  return mix64(mix64(master_seed + 0x9e3779b97f4a7c15ULL * (class_index + 1)) + trial_index + 1);
}

// Deterministic random stream. The engine is std::mt19937_64 (its output
// sequence is pinned by the standard); the distributions are hand-rolled so
// streams do not depend on the standard library's unspecified
// std::*_distribution algorithms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t bits() { return engine_(); }

  // Uniform on [0, 1), 53-bit resolution.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Standard normal via Marsaglia polar method.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform01() - 1.0;
      v = 2.0 * uniform01() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double k = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * k;
    have_spare_ = true;
    return u * k;
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace ssmvep

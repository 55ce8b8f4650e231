#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace notears {

// Portable RNG layer ("rng-v1"): mt19937_64 engine with hand-rolled transforms so
// that streams are reproducible across standard libraries (std::*_distribution
// implementations differ between vendors; these transforms do not).
class Rng {
 public:
  explicit Rng(uint64_t seed) : eng_(seed) {}

  // Uniform on the open interval (0,1): ((x >> 11) + 0.5) * 2^-53.
  double uniform();

  // Box-Muller; consumes exactly two uniforms per call, no spare-value caching.
  double normal(double mean = 0.0, double sd = 1.0);

  // -scale * ln(u); mean = scale.
  double exponential(double scale = 1.0);

  // -scale * ln(-ln(u)); location 0, variance (pi^2/6) * scale^2.
  double gumbel(double scale = 1.0);

  // Unbiased integer in [0, n) via rejection sampling; n >= 1.
  uint64_t uniform_int(uint64_t n);

  // Fisher-Yates shuffle of (0, ..., d-1).
  std::vector<int> permutation(int d);

 private:
  std::mt19937_64 eng_;
};

// splitmix64-style stream derivation ("rng-v1"):
//   z = mix(master); z = mix(z ^ (a + K1)); z = mix(z ^ (b + K2))
// with mix the splitmix64 finalizer. Used to give every (cell, replicate)
// an independent seed without bookkeeping.
uint64_t derive_seed(uint64_t master, uint64_t a, uint64_t b);

}  // namespace notears

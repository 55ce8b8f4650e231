#include "notears/rng.hpp"

#include <cmath>

#include "notears/errors.hpp"

namespace notears {

double Rng::uniform() {
  const uint64_t x = eng_();
  return (static_cast<double>(x >> 11) + 0.5) * 0x1.0p-53;
}

double Rng::normal(double mean, double sd) {
  const double u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  return mean + sd * r * std::cos(2.0 * M_PI * u2);
}

double Rng::exponential(double scale) { return -scale * std::log(uniform()); }

double Rng::gumbel(double scale) { return -scale * std::log(-std::log(uniform())); }

uint64_t Rng::uniform_int(uint64_t n) {
  if (n == 0) throw invalid_argument_error("uniform_int: n must be >= 1");
  const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  uint64_t x;
  do {
    x = eng_();
  } while (x >= limit);
  return x % n;
}

std::vector<int> Rng::permutation(int d) {
  std::vector<int> p(d);
  for (int i = 0; i < d; ++i) p[i] = i;
  for (int i = d - 1; i > 0; --i) {
    const int j = static_cast<int>(uniform_int(static_cast<uint64_t>(i) + 1));
    std::swap(p[i], p[j]);
  }
  return p;
}

namespace {
inline uint64_t mix64(uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}
}  // namespace

uint64_t derive_seed(uint64_t master, uint64_t a, uint64_t b) {
  uint64_t z = mix64(master);
  z = mix64(z ^ (a + 0x9e3779b97f4a7c15ull));
  z = mix64(z ^ (b + 0x7f4a7c159e3779b9ull));
  return z;
}

}  // namespace notears

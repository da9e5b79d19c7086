#pragma once

#include <cassert>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

// Deterministic randomness helpers. The engine is std::mt19937_64 (fully
// specified by the standard); the samplers below are hand-rolled so that
// results are identical across standard-library implementations, which the
// seeded-experiment contracts rely on.

namespace driverseg::rng {

using engine = std::mt19937_64;

// splitmix64 finalizer, used to derive well-separated subsystem seeds.
inline std::uint64_t mix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t derive(std::uint64_t seed, std::uint64_t stream) {
  return mix(seed ^ mix(stream));
}

template <class... Rest>
std::uint64_t derive(std::uint64_t seed, std::uint64_t stream, Rest... rest) {
  return derive(derive(seed, stream), rest...);
}

// Uniform integer in [0, n), rejection-sampled to avoid modulo bias.
inline std::uint64_t uniform_index(engine& eng, std::uint64_t n) {
  assert(n > 0);
  const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
  const std::uint64_t limit = max - max % n;
  std::uint64_t x = eng();
  while (x >= limit) x = eng();
  return x % n;
}

// Uniform double in [0, 1), 53-bit resolution.
inline double uniform01(engine& eng) {
  return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

inline double uniform(engine& eng, double lo, double hi) {
  return lo + (hi - lo) * uniform01(eng);
}

// Box-Muller normal sampler; caches the paired variate.
class normal_sampler {
 public:
  double operator()(engine& eng) {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform01(eng);  // (0, 1], keeps log finite
    const double u2 = uniform01(eng);
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

 private:
  double spare_ = 0.0;
  bool has_spare_ = false;
};

inline double normal(engine& eng) {
  normal_sampler s;
  return s(eng);
}

// Fisher-Yates shuffle driven by uniform_index.
template <class T>
void shuffle(std::vector<T>& v, engine& eng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::swap(v[i - 1], v[uniform_index(eng, i)]);
  }
}

}  // namespace driverseg::rng

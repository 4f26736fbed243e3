#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace testutil {

/* Deterministic RNG for test data. Uniform doubles are derived from the
   raw 64-bit stream the same way on every platform. */
class Rng {
public:
  explicit Rng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ULL) {}

  std::uint64_t next_u64() {
    // splitmix64
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  double uniform() {  // [0, 1)
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  int uniform_int(int n) {  // [0, n)
    return static_cast<int>(next_u64() % static_cast<std::uint64_t>(n));
  }

  std::vector<double> point(std::size_t dim, double lo, double hi) {
    std::vector<double> p(dim);
    for (auto& x : p) x = uniform(lo, hi);
    return p;
  }

private:
  std::uint64_t state_;
};

}  // namespace testutil

#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace srmin {

/* splitmix64-based generator for the deterministic sampling the library
   does internally (structure verification, ruled-frame checks). Uniform
   doubles are derived from the raw stream identically on every platform. */
class SampleRng {
public:
  explicit SampleRng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ULL) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /* A point sampled in the axis-aligned box centered at `center` with the
     given half-width in every coordinate. */
  std::vector<double> point_near(std::span<const double> center, double half_width) {
    std::vector<double> p(center.begin(), center.end());
    for (auto& x : p) x += uniform(-half_width, half_width);
    return p;
  }

private:
  std::uint64_t state_;
};

}  // namespace srmin

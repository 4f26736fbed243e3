#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace srmin {

/* Structured quad mesh over an (s, t) parameter grid, row-major in s.
   Vertex (s, t) sits at index s*n_t + t. Optional per-vertex channels are
   either empty or full-size. */
struct SurfaceMesh {
  std::size_t n_s = 0;
  std::size_t n_t = 0;
  std::vector<double> svals;  // size n_s
  std::vector<double> tvals;  // size n_t

  std::vector<std::array<double, 3>> vertices;  // size n_s*n_t
  std::vector<double> phi;                      // per vertex, optional
  std::vector<double> d1;                       // per vertex, optional
  std::vector<std::uint8_t> fold;               // per cell, optional
  std::vector<std::uint8_t> strip_flags;        // per s-row, optional: 1 = truncated

  // Column holding the sweep's base curve, when one exists in [t0, t1].
  static constexpr std::size_t kNoZeroColumn = static_cast<std::size_t>(-1);
  std::size_t t_zero_index = kNoZeroColumn;

  std::size_t idx(std::size_t s, std::size_t t) const { return s * n_t + t; }
  std::size_t cell_idx(std::size_t s, std::size_t t) const { return s * (n_t - 1) + t; }
  std::size_t vertex_count() const { return n_s * n_t; }
  std::size_t cell_count() const { return (n_s > 0 && n_t > 0) ? (n_s - 1) * (n_t - 1) : 0; }

  const std::array<double, 3>& at(std::size_t s, std::size_t t) const {
    return vertices[idx(s, t)];
  }
};

std::vector<double> linspace(double a, double b, std::size_t n);

/* Sample a parametric patch onto a structured mesh. `d1_of` (optional)
   fills the per-vertex d1 channel, typically with the horizontal-gradient
   norm of a level function. */
SurfaceMesh build_patch(
    const std::function<std::array<double, 3>(double, double)>& point_of,
    std::span<const double> svals, std::span<const double> tvals,
    const std::function<double(const std::array<double, 3>&)>& d1_of = nullptr);

}  // namespace srmin

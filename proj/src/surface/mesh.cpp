#include "surface/mesh.hpp"

#include <stdexcept>

namespace srmin {

std::vector<double> linspace(double a, double b, std::size_t n) {
  if (n == 0) return {};
  if (n == 1) return {a};
  std::vector<double> out(n);
  const double h = (b - a) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) out[i] = a + h * static_cast<double>(i);
  out.back() = b;  // exact endpoint regardless of rounding in the sum
  return out;
}

SurfaceMesh build_patch(
    const std::function<std::array<double, 3>(double, double)>& point_of,
    std::span<const double> svals, std::span<const double> tvals,
    const std::function<double(const std::array<double, 3>&)>& d1_of) {
  if (!point_of) throw std::invalid_argument("build_patch: null point function");
  if (svals.size() < 2 || tvals.size() < 2)
    throw std::invalid_argument("build_patch: need at least a 2x2 grid");

  SurfaceMesh mesh;
  mesh.n_s = svals.size();
  mesh.n_t = tvals.size();
  mesh.svals.assign(svals.begin(), svals.end());
  mesh.tvals.assign(tvals.begin(), tvals.end());
  mesh.vertices.resize(mesh.vertex_count());
  if (d1_of) mesh.d1.resize(mesh.vertex_count());

  for (std::size_t s = 0; s < mesh.n_s; ++s)
    for (std::size_t t = 0; t < mesh.n_t; ++t) {
      const std::array<double, 3> p = point_of(svals[s], tvals[t]);
      mesh.vertices[mesh.idx(s, t)] = p;
      if (d1_of) mesh.d1[mesh.idx(s, t)] = d1_of(p);
    }
  return mesh;
}

}  // namespace srmin

#include "surface/area.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "surface/level.hpp"

namespace srmin {

namespace {

using Vec3 = std::array<double, 3>;

double det3(const Vec3& a, const Vec3& b, const Vec3& c) {
  return a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0]) +
         a[2] * (b[0] * c[1] - b[1] * c[0]);
}

Vec3 sub(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }

/* Single compiled program for (X1, X2, Reeb); one evaluation per queried
   point instead of three. */
struct FrameEval {
  expr::Program prog;
  std::vector<double> scratch;
  std::array<double, 9> out{};

  explicit FrameEval(const SRStructure& s) {
    std::vector<expr::ExprPtr> outs;
    outs.reserve(9);
    for (std::size_t i = 0; i < 2; ++i)
      for (int k = 0; k < 3; ++k) outs.push_back(s.frame_field(i).components[k]);
    for (int k = 0; k < 3; ++k) outs.push_back(s.reeb_field().components[k]);
    prog = expr::Program(outs);
    scratch.resize(prog.scratch_size());
  }

  void at(const Vec3& q, Vec3& x1, Vec3& x2, Vec3& reeb) {
    prog.evaluate(q, out, scratch);
    x1 = {out[0], out[1], out[2]};
    x2 = {out[3], out[4], out[5]};
    reeb = {out[6], out[7], out[8]};
  }

  double frame_det(const Vec3& q) {
    Vec3 x1, x2, reeb;
    at(q, x1, x2, reeb);
    return det3(x1, x2, reeb);
  }
};

void check_mesh(const SRStructure& s, const SurfaceMesh& mesh) {
  if (s.dim() != 3) throw std::invalid_argument("surface integrals need a 3-dimensional structure");
  if (mesh.n_s < 2 || mesh.n_t < 2 || mesh.vertices.size() != mesh.vertex_count())
    throw std::invalid_argument("surface integrals need a complete mesh of at least 2x2 vertices");
}

}  // namespace

double horizontal_area(const SRStructure& s, const SurfaceMesh& mesh) {
  check_mesh(s, mesh);
  if (!mesh.d1.empty()) {
    if (mesh.d1.size() != mesh.vertex_count())
      throw std::invalid_argument("horizontal_area: d1 channel has the wrong size");
    for (double v : mesh.d1)
      if (v < kCharacteristicEps)
        throw NumericError("horizontal_area: mesh contains a characteristic vertex");
  }

  FrameEval frames(s);
  double area = 0;
  for (std::size_t si = 0; si + 1 < mesh.n_s; ++si)
    for (std::size_t ti = 0; ti + 1 < mesh.n_t; ++ti) {
      const Vec3& p00 = mesh.at(si, ti);
      const Vec3& p10 = mesh.at(si + 1, ti);
      const Vec3& p01 = mesh.at(si, ti + 1);
      const Vec3& p11 = mesh.at(si + 1, ti + 1);
      Vec3 center, es, et;
      for (int k = 0; k < 3; ++k) {
        center[k] = 0.25 * (p00[k] + p10[k] + p01[k] + p11[k]);
        es[k] = 0.5 * ((p10[k] - p00[k]) + (p11[k] - p01[k]));
        et[k] = 0.5 * ((p01[k] - p00[k]) + (p11[k] - p10[k]));
      }
      Vec3 x1, x2, reeb;
      frames.at(center, x1, x2, reeb);
      const double fdet = det3(x1, x2, reeb);
      if (std::fabs(fdet) < 1e-14)
        throw NumericError("horizontal_area: canonical frame is singular inside the mesh");
      const double a1 = det3(x1, es, et) / fdet;
      const double a2 = det3(x2, es, et) / fdet;
      area += std::hypot(a1, a2);
    }
  return area;
}

double cylinder_volume_rate(
    const SRStructure& s, const SurfaceMesh& mesh,
    const std::function<double(const std::array<double, 3>&)>& phi_of, double epsilon) {
  check_mesh(s, mesh);
  if (!(epsilon > 0)) throw std::invalid_argument("cylinder_volume_rate: epsilon must be positive");
  const bool use_channel = !mesh.phi.empty();
  if (use_channel && mesh.phi.size() != mesh.vertex_count())
    throw std::invalid_argument("cylinder_volume_rate: phi channel has the wrong size");
  if (!use_channel && !phi_of)
    throw std::invalid_argument("cylinder_volume_rate: no phi source");

  FrameEval frames(s);
  const auto velocity = [&](const Vec3& q, double c, double sn) -> Vec3 {
    Vec3 x1, x2, reeb;
    frames.at(q, x1, x2, reeb);
    return {c * x1[0] + sn * x2[0], c * x1[1] + sn * x2[1], c * x1[2] + sn * x2[2]};
  };

  std::vector<Vec3> flowed(mesh.vertex_count());
  const int kSteps = 2;
  const double h = epsilon / kSteps;
  for (std::size_t i = 0; i < mesh.vertex_count(); ++i) {
    const double phi = use_channel ? mesh.phi[i] : phi_of(mesh.vertices[i]);
    const double c = std::cos(phi), sn = std::sin(phi);
    Vec3 q = mesh.vertices[i];
    for (int st = 0; st < kSteps; ++st) {
      const Vec3 k1 = velocity(q, c, sn);
      Vec3 tmp;
      for (int k = 0; k < 3; ++k) tmp[k] = q[k] + 0.5 * h * k1[k];
      const Vec3 k2 = velocity(tmp, c, sn);
      for (int k = 0; k < 3; ++k) tmp[k] = q[k] + 0.5 * h * k2[k];
      const Vec3 k3 = velocity(tmp, c, sn);
      for (int k = 0; k < 3; ++k) tmp[k] = q[k] + h * k3[k];
      const Vec3 k4 = velocity(tmp, c, sn);
      for (int k = 0; k < 3; ++k)
        q[k] += h / 6.0 * (k1[k] + 2.0 * k2[k] + 2.0 * k3[k] + k4[k]);
    }
    flowed[i] = q;
  }

  // Each quad cell and its flowed image bound two triangular prisms; each
  // prism splits into three tetrahedra measured in canonical volume.
  const auto tet = [&](const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) -> double {
    Vec3 centroid;
    for (int k = 0; k < 3; ++k) centroid[k] = 0.25 * (a[k] + b[k] + c[k] + d[k]);
    const double fdet = frames.frame_det(centroid);
    if (std::fabs(fdet) < 1e-14)
      throw NumericError("cylinder_volume_rate: canonical frame is singular inside the swept region");
    return std::fabs(det3(sub(b, a), sub(c, a), sub(d, a)) / fdet) / 6.0;
  };
  const auto prism = [&](const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& a2,
                         const Vec3& b2, const Vec3& c2) -> double {
    return tet(a, b, c, a2) + tet(b, c, a2, b2) + tet(c, a2, b2, c2);
  };

  double vol = 0;
  for (std::size_t si = 0; si + 1 < mesh.n_s; ++si)
    for (std::size_t ti = 0; ti + 1 < mesh.n_t; ++ti) {
      const std::size_t i00 = mesh.idx(si, ti), i10 = mesh.idx(si + 1, ti);
      const std::size_t i01 = mesh.idx(si, ti + 1), i11 = mesh.idx(si + 1, ti + 1);
      vol += prism(mesh.vertices[i00], mesh.vertices[i10], mesh.vertices[i11], flowed[i00],
                   flowed[i10], flowed[i11]);
      vol += prism(mesh.vertices[i00], mesh.vertices[i11], mesh.vertices[i01], flowed[i00],
                   flowed[i11], flowed[i01]);
    }
  return vol / epsilon;
}

}  // namespace srmin

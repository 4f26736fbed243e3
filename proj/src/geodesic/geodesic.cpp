#include "geodesic/geodesic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "core/frame_probe.hpp"

namespace srmin {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Coefficients within this of zero are treated as vanishing when picking
// the geodesic directions of a constant tensor.
constexpr double kCoeffEps = 1e-10;

/* The extremal system bound to a structure; reuses the probe's scratch
   across RK4 stages. State layout (x, y, z, psi, u3). All constants with
   a "3" index come out of the probe with the opposite order, so
   c_31^k = -c_13^k and c_32^1 = -c_23^1. */
class GeodesicSystem {
 public:
  explicit GeodesicSystem(const SRStructure& s) : probe_(s) {
    if (s.dim() != 3)
      throw std::invalid_argument("geodesic system requires a 3-dimensional chart");
  }

  std::array<double, 5> deriv(const std::array<double, 5>& y) {
    try {
      probe_.move_to(std::span<const double>(y.data(), 3));
    } catch (const expr::EvalError& e) {
      throw NumericError(std::string("frame degenerate at the sampled point: ") + e.what());
    }
    const double u1 = std::cos(y[3]), u2 = std::sin(y[3]);
    const std::span<const double> x1 = probe_.field(0);
    const std::span<const double> x2 = probe_.field(1);
    std::array<double, 5> d;
    for (int i = 0; i < 3; ++i) d[i] = u1 * x1[i] + u2 * x2[i];
    probe_.pair_constants(0, 1, c01_);
    probe_.pair_constants(0, 2, c02_);
    probe_.pair_constants(1, 2, c12_);
    d[3] = -y[4] - (u1 * c01_[0] + u2 * c01_[1]);
    d[4] = -c02_[0] * (u1 * u1 - u2 * u2) - (c12_[0] + c02_[1]) * u1 * u2;
    return d;
  }

  void step(std::array<double, 5>& y, double dt) {
    const std::array<double, 5> k1 = deriv(y);
    std::array<double, 5> u;
    for (int i = 0; i < 5; ++i) u[i] = y[i] + 0.5 * dt * k1[i];
    const std::array<double, 5> k2 = deriv(u);
    for (int i = 0; i < 5; ++i) u[i] = y[i] + 0.5 * dt * k2[i];
    const std::array<double, 5> k3 = deriv(u);
    for (int i = 0; i < 5; ++i) u[i] = y[i] + dt * k3[i];
    const std::array<double, 5> k4 = deriv(u);
    for (int i = 0; i < 5; ++i)
      y[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }

  static std::size_t substep_count(double span, double h) {
    const double n = std::ceil(std::abs(span) / h - 1e-9);
    return n < 1.0 ? 1 : static_cast<std::size_t>(n);
  }

 private:
  FrameProbe probe_;
  std::array<double, 3> c01_{}, c02_{}, c12_{};
};

void check_time_args(double t_begin, double t_end, double h) {
  if (!std::isfinite(t_begin) || !std::isfinite(t_end))
    throw std::invalid_argument("time span must be finite");
  if (!(h > 0.0) || !std::isfinite(h))
    throw std::invalid_argument("step size must be positive and finite");
}

void require_dim3(const SRStructure& s, const char* what) {
  if (s.dim() != 3)
    throw std::invalid_argument(std::string(what) + " requires a 3-dimensional chart");
}

}  // namespace

std::array<double, 5> geodesic_rhs(const SRStructure& s, const GeodesicState& state) {
  GeodesicSystem sys(s);
  return sys.deriv({state.q[0], state.q[1], state.q[2], state.psi, state.u3});
}

GeodesicTrajectory integrate_geodesic(const SRStructure& s, const GeodesicState& s0,
                                      double t_begin, double t_end, double h,
                                      const std::optional<ChartBox>& box) {
  check_time_args(t_begin, t_end, h);
  GeodesicSystem sys(s);

  GeodesicTrajectory out;
  out.t.push_back(t_begin);
  out.states.push_back({s0.q, wrap_angle(s0.psi), s0.u3});

  const double span = t_end - t_begin;
  if (span == 0.0) return out;
  const std::size_t m = GeodesicSystem::substep_count(span, h);
  const double dt = span / static_cast<double>(m);
  std::array<double, 5> y{s0.q[0], s0.q[1], s0.q[2], s0.psi, s0.u3};
  out.t.reserve(m + 1);
  out.states.reserve(m + 1);
  for (std::size_t k = 1; k <= m; ++k) {
    sys.step(y, dt);
    const std::array<double, 3> q{y[0], y[1], y[2]};
    if (box && !box->contains(q)) {
      out.truncated = true;
      break;
    }
    out.t.push_back(k == m ? t_end : t_begin + static_cast<double>(k) * dt);
    out.states.push_back({q, wrap_angle(y[3]), y[4]});
  }
  return out;
}

std::vector<PathSample> geodesic_path(const SRStructure& s, const GeodesicTrajectory& tr) {
  require_dim3(s, "geodesic_path");
  if (tr.t.size() != tr.states.size())
    throw std::invalid_argument("trajectory time grid and states disagree");
  FrameProbe probe(s);
  std::vector<PathSample> out;
  out.reserve(tr.states.size());
  for (std::size_t k = 0; k < tr.states.size(); ++k) {
    const GeodesicState& st = tr.states[k];
    try {
      probe.move_to(st.q);
    } catch (const expr::EvalError& e) {
      throw NumericError(std::string("frame degenerate at the sampled point: ") + e.what());
    }
    const std::span<const double> x1 = probe.field(0);
    const std::span<const double> x2 = probe.field(1);
    const double u1 = std::cos(st.psi), u2 = std::sin(st.psi);
    PathSample ps;
    ps.t = tr.t[k];
    ps.q = st.q;
    for (int i = 0; i < 3; ++i) ps.v[i] = u1 * x1[i] + u2 * x2[i];
    out.push_back(ps);
  }
  return out;
}

double sr_length(const SRStructure& s, std::span<const PathSample> path) {
  require_dim3(s, "sr_length");
  if (path.size() < 2)
    throw std::invalid_argument("arc length needs at least two samples");
  FrameProbe probe(s);
  std::array<double, 3> w{};
  std::vector<double> speed(path.size());
  for (std::size_t k = 0; k < path.size(); ++k) {
    try {
      probe.move_to(path[k].q);
    } catch (const expr::EvalError& e) {
      throw NumericError(std::string("frame degenerate at the sampled point: ") + e.what());
    }
    probe.decompose(path[k].v, w);
    if (std::abs(w[2]) > 1e-6)
      throw NumericError("path is not horizontal: transverse velocity at sample " +
                         std::to_string(k));
    speed[k] = std::hypot(w[0], w[1]);
  }
  double len = 0.0;
  for (std::size_t k = 1; k < path.size(); ++k)
    len += 0.5 * (speed[k - 1] + speed[k]) * std::abs(path[k].t - path[k - 1].t);
  return len;
}

double angle_condition_residual(const SRStructure& s, std::span<const double> q, double phi) {
  require_dim3(s, "angle_condition_residual");
  if (q.size() != 3) throw std::invalid_argument("point must have 3 coordinates");
  const StructuralConstants c = s.structural_constants(q);
  return c.at(2, 0, 0) * std::cos(2.0 * phi) +
         0.5 * (c.at(2, 1, 0) + c.at(2, 0, 1)) * std::sin(2.0 * phi);
}

PhiStar phi_star(const StructuralConstants& c) {
  if (c.n != 3) throw std::invalid_argument("phi_star requires a 3-dimensional tensor");
  const double c131 = c.at(0, 2, 0);
  const double csum = c.at(1, 2, 0) + c.at(0, 2, 1);  // c_23^1 + c_13^2
  PhiStar out;
  if (std::abs(csum) > kCoeffEps) {
    const double base = -0.5 * std::atan(2.0 * c131 / csum);
    for (int k = 0; k < 4; ++k)
      out.angles.push_back(wrap_angle(base + 0.5 * kPi * static_cast<double>(k)));
  } else if (std::abs(c131) > kCoeffEps) {
    for (int k = 0; k < 4; ++k)
      out.angles.push_back(wrap_angle(0.25 * kPi * static_cast<double>(2 * k + 1)));
  } else {
    out.all_angles = true;
    return out;
  }
  std::sort(out.angles.begin(), out.angles.end());
  return out;
}

PhiStar phi_star(const SRStructure& s, std::span<const double> q) {
  require_dim3(s, "phi_star");
  if (q.size() != 3) throw std::invalid_argument("point must have 3 coordinates");
  return phi_star(s.structural_constants(q));
}

char group_case_label(GroupCase c) {
  switch (c) {
    case GroupCase::A: return 'a';
    case GroupCase::B: return 'b';
    case GroupCase::C: return 'c';
    case GroupCase::D: return 'd';
  }
  return '?';
}

ClassificationReport classify_from_constants(const StructuralConstants& c) {
  if (c.n != 3)
    throw std::invalid_argument("classification requires a 3-dimensional tensor");
  const double c121 = c.at(0, 1, 0), c122 = c.at(0, 1, 1);
  ClassificationReport r;
  r.compatibility_residual =
      c.at(0, 2, 0) * (c121 * c121 - c122 * c122) +
      c121 * c122 * (c.at(1, 2, 0) + c.at(0, 2, 1));
  if (std::abs(c122) > kCoeffEps) {
    r.group_case = GroupCase::A;
    const double base = -std::atan(c121 / c122);
    r.phi.angles = {wrap_angle(base), wrap_angle(base + kPi)};
    std::sort(r.phi.angles.begin(), r.phi.angles.end());
  } else if (std::abs(c121) > kCoeffEps) {
    r.group_case = GroupCase::B;
    r.phi.angles = {0.5 * kPi, 1.5 * kPi};
  } else {
    // c_12 vanishes: every characteristic keeps its angle, and the angle
    // condition alone decides which directions are geodesic.
    r.phi = phi_star(c);
    r.group_case = r.phi.all_angles ? GroupCase::D : GroupCase::C;
  }
  return r;
}

ClassificationReport classify_group_case(const SRStructure& s, std::uint64_t seed) {
  require_dim3(s, "classify_group_case");
  const std::array<double, 3> jac = s.jacobi_residuals(seed);
  ClassificationReport r = classify_from_constants(s.structural_constants(s.reference_point()));
  r.jacobi = jac;
  return r;
}

GeodesicCheck is_characteristic_geodesic(const SRStructure& s,
                                         const CharacteristicTrajectory& tr) {
  require_dim3(s, "is_characteristic_geodesic");
  const std::size_t n = tr.states.size();
  if (n < 2 || tr.t.size() != n)
    throw std::invalid_argument("need a characteristic polyline of at least two samples");

  // Unwrap the stored angles so finite differences never see a 2*pi jump.
  std::vector<double> phi(n);
  phi[0] = tr.states[0].phi;
  for (std::size_t k = 1; k < n; ++k) {
    double d = tr.states[k].phi - tr.states[k - 1].phi;
    d -= kTwoPi * std::round(d / kTwoPi);
    phi[k] = phi[k - 1] + d;
  }

  FrameProbe probe(s);
  std::array<double, 3> c01{}, c02{}, c12{};
  std::vector<double> b(n);
  GeodesicCheck out;
  for (std::size_t k = 0; k < n; ++k) {
    try {
      probe.move_to(tr.states[k].q);
    } catch (const expr::EvalError& e) {
      throw NumericError(std::string("frame degenerate at the sampled point: ") + e.what());
    }
    probe.pair_constants(0, 1, c01);
    probe.pair_constants(0, 2, c02);
    probe.pair_constants(1, 2, c12);
    const double u1 = std::cos(tr.states[k].phi), u2 = std::sin(tr.states[k].phi);
    const double a = -c02[0] * (u1 * u1 - u2 * u2) - (c12[0] + c02[1]) * u1 * u2;
    b[k] = u1 * c01[0] + u2 * c01[1];
    out.max_u3_source = std::max(out.max_u3_source, std::abs(a));
  }

  /* dphi/dt on the recorded grid: 5-point stencils inside, 3-point next to
     the ends; the end nodes themselves carry no estimate (one-sided
     differences would drown the 1e-8 gate in truncation error). */
  for (std::size_t k = 1; k + 1 < n; ++k) {
    double dphi;
    if (k >= 2 && k + 2 < n) {
      const double hh = 0.25 * (tr.t[k + 2] - tr.t[k - 2]);
      dphi = (phi[k - 2] - 8.0 * phi[k - 1] + 8.0 * phi[k + 1] - phi[k + 2]) / (12.0 * hh);
    } else {
      dphi = (phi[k + 1] - phi[k - 1]) / (tr.t[k + 1] - tr.t[k - 1]);
    }
    out.max_angle_defect = std::max(out.max_angle_defect, std::abs(b[k] + dphi));
  }

  out.geodesic = out.max_u3_source <= 1e-8 && out.max_angle_defect <= 1e-8;
  return out;
}

}  // namespace srmin

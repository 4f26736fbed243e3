#include "flow/characteristic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "core/frame_probe.hpp"
#include "core/sampling.hpp"

namespace srmin {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

/* One characteristic system bound to a structure; reuses the probe's
   scratch across RK4 stages. State layout (x, y, z, phi). */
class CharSystem {
 public:
  explicit CharSystem(const SRStructure& s) : probe_(s) {
    if (s.dim() != 3)
      throw std::invalid_argument("characteristic system requires a 3-dimensional chart");
  }

  std::array<double, 4> deriv(const std::array<double, 4>& y) {
    try {
      probe_.move_to(std::span<const double>(y.data(), 3));
    } catch (const expr::EvalError& e) {
      // normalization blows up exactly where the frame degenerates; report
      // both through the same channel
      throw NumericError(std::string("frame degenerate at the sampled point: ") + e.what());
    }
    const double c = std::cos(y[3]), sn = std::sin(y[3]);
    const std::span<const double> x1 = probe_.field(0);
    const std::span<const double> x2 = probe_.field(1);
    std::array<double, 4> d;
    for (int i = 0; i < 3; ++i) d[i] = c * x1[i] + sn * x2[i];
    probe_.pair_constants(0, 1, cbuf_);
    d[3] = -c * cbuf_[0] - sn * cbuf_[1];
    return d;
  }

  void step(std::array<double, 4>& y, double dt) {
    const std::array<double, 4> k1 = deriv(y);
    std::array<double, 4> u;
    for (int i = 0; i < 4; ++i) u[i] = y[i] + 0.5 * dt * k1[i];
    const std::array<double, 4> k2 = deriv(u);
    for (int i = 0; i < 4; ++i) u[i] = y[i] + 0.5 * dt * k2[i];
    const std::array<double, 4> k3 = deriv(u);
    for (int i = 0; i < 4; ++i) u[i] = y[i] + dt * k3[i];
    const std::array<double, 4> k4 = deriv(u);
    for (int i = 0; i < 4; ++i)
      y[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }

  /* March from t_at to t_target in uniform substeps of nominal size h.
     Returns false (leaving y at the last in-box substep) as soon as a
     substep lands outside the box. */
  bool march(std::array<double, 4>& y, double t_at, double t_target, double h,
             const std::optional<ChartBox>& box) {
    const double span = t_target - t_at;
    if (span == 0.0) return true;
    const std::size_t m = substep_count(span, h);
    const double dt = span / static_cast<double>(m);
    for (std::size_t k = 0; k < m; ++k) {
      std::array<double, 4> next = y;
      step(next, dt);
      if (box && !box->contains({next[0], next[1], next[2]})) return false;
      y = next;
    }
    return true;
  }

  static std::size_t substep_count(double span, double h) {
    const double n = std::ceil(std::abs(span) / h - 1e-9);
    return n < 1.0 ? 1 : static_cast<std::size_t>(n);
  }

 private:
  FrameProbe probe_;
  std::array<double, 3> cbuf_{};
};

void check_time_args(double t_begin, double t_end, double h) {
  if (!std::isfinite(t_begin) || !std::isfinite(t_end))
    throw std::invalid_argument("time span must be finite");
  if (!(h > 0.0) || !std::isfinite(h))
    throw std::invalid_argument("step size must be positive and finite");
}

struct TimeGrid {
  std::vector<double> tvals;
  std::size_t zero = SurfaceMesh::kNoZeroColumn;
};

/* n_t nodes over [t0, t1]; when 0 is interior the grid is split so one node
   sits exactly at 0, keeping each side's spacing within 1.5x nominal. */
TimeGrid time_grid(double t0, double t1, std::size_t n_t) {
  TimeGrid g;
  if (t0 == 0.0) {
    g.tvals = linspace(t0, t1, n_t);
    g.zero = 0;
  } else if (t1 == 0.0) {
    g.tvals = linspace(t0, t1, n_t);
    g.zero = n_t - 1;
  } else if (t0 < 0.0 && t1 > 0.0) {
    const double frac = -t0 / (t1 - t0);
    const auto k = static_cast<std::size_t>(std::clamp<long long>(
        std::llround(frac * static_cast<double>(n_t - 1)), 1,
        static_cast<long long>(n_t) - 2));
    g.tvals = linspace(t0, 0.0, k + 1);
    const std::vector<double> pos = linspace(0.0, t1, n_t - k);
    g.tvals.insert(g.tvals.end(), pos.begin() + 1, pos.end());
    g.zero = k;
  } else {
    g.tvals = linspace(t0, t1, n_t);
  }
  return g;
}

std::array<double, 3> cell_normal(const SurfaceMesh& m, std::size_t i, std::size_t j) {
  const std::array<double, 3>& a = m.at(i, j);
  const std::array<double, 3>& b = m.at(i, j + 1);
  const std::array<double, 3>& c = m.at(i + 1, j);
  const std::array<double, 3>& d = m.at(i + 1, j + 1);
  std::array<double, 3> es, et;
  for (int k = 0; k < 3; ++k) {
    es[k] = 0.5 * ((c[k] - a[k]) + (d[k] - b[k]));
    et[k] = 0.5 * ((b[k] - a[k]) + (d[k] - c[k]));
  }
  return {es[1] * et[2] - es[2] * et[1], es[2] * et[0] - es[0] * et[2],
          es[0] * et[1] - es[1] * et[0]};
}

void mark_folds(SurfaceMesh& mesh) {
  mesh.fold.assign(mesh.cell_count(), 0);
  if (mesh.n_s < 2 || mesh.n_t < 2) return;
  const std::size_t cs = mesh.n_s - 1, ct = mesh.n_t - 1;
  std::vector<std::array<double, 3>> normal(cs * ct);
  std::vector<double> len(cs * ct);
  for (std::size_t i = 0; i < cs; ++i)
    for (std::size_t j = 0; j < ct; ++j) {
      const std::array<double, 3> n = cell_normal(mesh, i, j);
      normal[i * ct + j] = n;
      len[i * ct + j] = std::sqrt(n[0] * n[0] + n[1] * n[1] + n[2] * n[2]);
    }
  const auto flips = [&](std::size_t a, std::size_t b) {
    const double dot = normal[a][0] * normal[b][0] + normal[a][1] * normal[b][1] +
                       normal[a][2] * normal[b][2];
    // strictly reversed with a margin, so near-orthogonal noise never flags
    return dot < -1e-12 * len[a] * len[b];
  };
  for (std::size_t i = 0; i < cs; ++i)
    for (std::size_t j = 0; j < ct; ++j) {
      const std::size_t c = i * ct + j;
      const bool f = (i > 0 && flips(c, c - ct)) || (i + 1 < cs && flips(c, c + ct)) ||
                     (j > 0 && flips(c, c - 1)) || (j + 1 < ct && flips(c, c + 1));
      mesh.fold[c] = f ? 1 : 0;
    }
}

}  // namespace

double wrap_angle(double a) {
  double r = std::fmod(a, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;
  return r;
}

std::array<double, 4> characteristic_rhs(const SRStructure& s, const ExtendedState& state) {
  CharSystem sys(s);
  return sys.deriv({state.q[0], state.q[1], state.q[2], state.phi});
}

CharacteristicTrajectory integrate_characteristic(const SRStructure& s,
                                                  const ExtendedState& s0, double t_begin,
                                                  double t_end, double h,
                                                  const std::optional<ChartBox>& box) {
  check_time_args(t_begin, t_end, h);
  CharSystem sys(s);

  CharacteristicTrajectory out;
  out.t.push_back(t_begin);
  out.states.push_back({s0.q, wrap_angle(s0.phi)});

  const double span = t_end - t_begin;
  if (span == 0.0) return out;
  const std::size_t m = CharSystem::substep_count(span, h);
  const double dt = span / static_cast<double>(m);
  std::array<double, 4> y{s0.q[0], s0.q[1], s0.q[2], s0.phi};
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
    out.states.push_back({q, wrap_angle(y[3])});
  }
  return out;
}

std::array<double, 3> closed_form_h1(const std::array<double, 3>& q0, double phi, double t) {
  const double c = std::cos(phi), s = std::sin(phi);
  return {q0[0] + t * c, q0[1] + t * s, q0[2] + 0.5 * t * (q0[1] * c - q0[0] * s)};
}

std::array<double, 3> closed_form_e2(const std::array<double, 3>& q0, double phi, double t) {
  const double c = std::cos(phi), s = std::sin(phi);
  if (std::abs(s) < 1e-12) {
    const double cz = std::cos(q0[2]), sz = std::sin(q0[2]);
    return {q0[0] + t * c * cz, q0[1] + t * c * sz, q0[2]};
  }
  const double z = q0[2] + t * s;
  const double k = c / s;
  return {q0[0] + k * (std::sin(z) - std::sin(q0[2])),
          q0[1] - k * (std::cos(z) - std::cos(q0[2])), z};
}

SurfaceMesh sweep_surface(const SRStructure& s, const SweepSpec& spec) {
  if (s.dim() != 3)
    throw std::invalid_argument("sweep_surface: chart dimension must be 3");
  for (const auto& g : spec.gamma)
    if (!g) throw std::invalid_argument("sweep_surface: null curve component");
  if (!spec.phi0) throw std::invalid_argument("sweep_surface: null angle expression");
  for (const auto& g : spec.gamma)
    if (expr::max_coord(g) > 0)
      throw std::invalid_argument("sweep_surface: curve components may only use the symbol s");
  if (expr::max_coord(spec.phi0) > 0)
    throw std::invalid_argument("sweep_surface: angle expression may only use the symbol s");
  if (spec.n_s < 1) throw std::invalid_argument("sweep_surface: n_s must be at least 1");
  if (spec.n_t < 2) throw std::invalid_argument("sweep_surface: n_t must be at least 2");
  if (!std::isfinite(spec.s_begin) || !std::isfinite(spec.s_end) || spec.s_end < spec.s_begin)
    throw std::invalid_argument("sweep_surface: bad s range");
  if (!std::isfinite(spec.t_begin) || !std::isfinite(spec.t_end) ||
      !(spec.t_end > spec.t_begin))
    throw std::invalid_argument("sweep_surface: bad t span");
  if (!(spec.h > 0.0) || !std::isfinite(spec.h))
    throw std::invalid_argument("sweep_surface: step size must be positive and finite");

  SurfaceMesh mesh;
  mesh.n_s = spec.n_s;
  mesh.n_t = spec.n_t;
  mesh.svals = spec.n_s == 1 ? std::vector<double>{spec.s_begin}
                             : linspace(spec.s_begin, spec.s_end, spec.n_s);
  TimeGrid grid = time_grid(spec.t_begin, spec.t_end, spec.n_t);
  mesh.tvals = std::move(grid.tvals);
  mesh.t_zero_index = grid.zero;
  mesh.vertices.assign(mesh.vertex_count(), {});
  mesh.phi.assign(mesh.vertex_count(), 0.0);
  mesh.strip_flags.assign(mesh.n_s, 0);

  CharSystem sys(s);
  for (std::size_t i = 0; i < mesh.n_s; ++i) {
    const double sv = mesh.svals[i];
    const std::span<const double> spt(&sv, 1);
    std::array<double, 3> q0;
    for (int k = 0; k < 3; ++k) q0[k] = expr::evaluate(spec.gamma[k], spt);
    const double phi0 = wrap_angle(expr::evaluate(spec.phi0, spt));

    const std::size_t anchor = mesh.t_zero_index != SurfaceMesh::kNoZeroColumn
                                   ? mesh.t_zero_index
                                   : (mesh.tvals.front() > 0.0 ? 0 : mesh.n_t - 1);
    std::array<double, 4> y0{q0[0], q0[1], q0[2], phi0};
    bool anchored = true;
    try {
      anchored = sys.march(y0, 0.0, mesh.tvals[anchor], spec.h, spec.box);
    } catch (const NumericError&) {
      anchored = false;
    }
    std::array<double, 3> aq{y0[0], y0[1], y0[2]};
    double aphi = wrap_angle(y0[3]);
    if (mesh.t_zero_index != SurfaceMesh::kNoZeroColumn) {
      aq = q0;  // the base-curve column is stored exactly, not re-evaluated
      aphi = phi0;
    }
    mesh.vertices[mesh.idx(i, anchor)] = aq;
    mesh.phi[mesh.idx(i, anchor)] = aphi;
    if (!anchored) {
      // never reached the first node: hold the strip at the stop state
      for (std::size_t j = 0; j < mesh.n_t; ++j) {
        mesh.vertices[mesh.idx(i, j)] = aq;
        mesh.phi[mesh.idx(i, j)] = aphi;
      }
      mesh.strip_flags[i] = 1;
      continue;
    }

    const auto run = [&](std::ptrdiff_t dir) {
      std::array<double, 4> y{aq[0], aq[1], aq[2], y0[3]};
      double t_at = mesh.tvals[anchor];
      std::array<double, 3> lastq = aq;
      double lastphi = aphi;
      bool dead = false;
      for (std::ptrdiff_t j = static_cast<std::ptrdiff_t>(anchor) + dir;
           j >= 0 && j < static_cast<std::ptrdiff_t>(mesh.n_t); j += dir) {
        const std::size_t vj = mesh.idx(i, static_cast<std::size_t>(j));
        if (!dead) {
          bool ok = true;
          try {
            ok = sys.march(y, t_at, mesh.tvals[static_cast<std::size_t>(j)], spec.h,
                           spec.box);
          } catch (const NumericError&) {
            ok = false;
          }
          if (ok) {
            lastq = {y[0], y[1], y[2]};
            lastphi = wrap_angle(y[3]);
            t_at = mesh.tvals[static_cast<std::size_t>(j)];
          } else {
            dead = true;
            mesh.strip_flags[i] = 1;
          }
        }
        mesh.vertices[vj] = lastq;
        mesh.phi[vj] = lastphi;
      }
    };
    if (anchor + 1 < mesh.n_t) run(+1);
    if (anchor > 0) run(-1);
  }

  mark_folds(mesh);
  return mesh;
}

bool ruled_condition(const SRStructure& s, const ChartBox& box, std::uint64_t seed) {
  if (s.dim() != 3)
    throw std::invalid_argument("ruled_condition: chart dimension must be 3");
  for (int i = 0; i < 3; ++i)
    if (!(box.hi[i] >= box.lo[i]) || !std::isfinite(box.lo[i]) || !std::isfinite(box.hi[i]))
      throw std::invalid_argument("ruled_condition: bad sample box");
  SampleRng rng(seed);
  FrameProbe probe(s);
  std::array<double, 3> q, c;
  for (int n = 0; n < 100; ++n) {
    for (int i = 0; i < 3; ++i) q[i] = rng.uniform(box.lo[i], box.hi[i]);
    probe.move_to(q);
    probe.pair_constants(0, 1, c);
    if (std::max(std::abs(c[0]), std::abs(c[1])) > 1e-10) return false;
  }
  return true;
}

}  // namespace srmin

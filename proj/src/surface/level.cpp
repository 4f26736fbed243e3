#include "surface/level.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "core/linalg.hpp"
#include "expr/ast.hpp"
#include "surface/mesh.hpp"

namespace srmin {

namespace {

std::array<double, 3> to3(std::span<const double> q) {
  return {q[0], q[1], q[2]};
}

double dot3(const std::array<double, 3>& a, const std::array<double, 3>& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

std::array<double, 3> cross3(const std::array<double, 3>& a, const std::array<double, 3>& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

double norm3(const std::array<double, 3>& a) { return std::sqrt(dot3(a, a)); }

bool inside(const SearchBox& box, const std::array<double, 3>& p, double slack) {
  for (int k = 0; k < 3; ++k)
    if (p[k] < box.lo[k] - slack || p[k] > box.hi[k] + slack) return false;
  return true;
}

}  // namespace

LevelSurfaceAnalyzer::LevelSurfaceAnalyzer(std::shared_ptr<const SRStructure> structure,
                                           LevelSurface surface)
    : structure_(std::move(structure)), surface_(std::move(surface)) {
  if (!structure_) throw std::invalid_argument("LevelSurfaceAnalyzer: null structure");
  if (!surface_.f) throw std::invalid_argument("LevelSurfaceAnalyzer: null level function");
  if (structure_->dim() != 3)
    throw std::invalid_argument("LevelSurfaceAnalyzer: structure must be 3-dimensional");
  if (expr::max_coord(surface_.f) >= 3)
    throw std::invalid_argument("LevelSurfaceAnalyzer: level function uses unknown coordinates");

  const VectorFieldExpr& x1 = structure_->frame_field(0);
  const VectorFieldExpr& x2 = structure_->frame_field(1);
  const VectorFieldExpr& reeb = structure_->reeb_field();

  const expr::ExprPtr f = surface_.f;
  const expr::ExprPtr x1f = directional_derivative(x1, f);
  const expr::ExprPtr x2f = directional_derivative(x2, f);
  const expr::ExprPtr x3f = directional_derivative(reeb, f);

  std::vector<expr::ExprPtr> ev;
  ev.reserve(20);
  ev.push_back(f);
  ev.push_back(x1f);
  ev.push_back(x2f);
  ev.push_back(x3f);
  ev.push_back(directional_derivative(x1, x1f));
  ev.push_back(directional_derivative(x2, x1f));
  ev.push_back(directional_derivative(x1, x2f));
  ev.push_back(directional_derivative(x2, x2f));
  for (int k = 0; k < 3; ++k) ev.push_back(expr::differentiate(f, k));
  for (int k = 0; k < 3; ++k) ev.push_back(x1.components[k]);
  for (int k = 0; k < 3; ++k) ev.push_back(x2.components[k]);
  for (int k = 0; k < 3; ++k) ev.push_back(reeb.components[k]);
  eval_ = expr::Program(ev);

  std::vector<expr::ExprPtr> nw;
  nw.reserve(12);
  nw.push_back(f);
  nw.push_back(x1f);
  nw.push_back(x2f);
  for (int k = 0; k < 3; ++k) nw.push_back(expr::differentiate(f, k));
  for (int k = 0; k < 3; ++k) nw.push_back(expr::differentiate(x1f, k));
  for (int k = 0; k < 3; ++k) nw.push_back(expr::differentiate(x2f, k));
  newton_ = expr::Program(nw);
}

LevelSurfaceAnalyzer::PointEval LevelSurfaceAnalyzer::evaluate(std::span<const double> q) const {
  if (q.size() != 3) throw std::invalid_argument("LevelSurfaceAnalyzer: point must have 3 coordinates");
  std::vector<double> out = eval_.evaluate(q);
  PointEval e{};
  e.f = out[0];
  e.x1f = out[1];
  e.x2f = out[2];
  e.x3f = out[3];
  e.x11f = out[4];
  e.x21f = out[5];
  e.x12f = out[6];
  e.x22f = out[7];
  for (int k = 0; k < 3; ++k) e.grad_f[k] = out[8 + k];
  for (int k = 0; k < 3; ++k) e.x1[k] = out[11 + k];
  for (int k = 0; k < 3; ++k) e.x2[k] = out[14 + k];
  for (int k = 0; k < 3; ++k) e.reeb[k] = out[17 + k];
  return e;
}

double LevelSurfaceAnalyzer::level_value(std::span<const double> q) const {
  if (q.size() != 3) throw std::invalid_argument("LevelSurfaceAnalyzer: point must have 3 coordinates");
  return expr::evaluate(surface_.f, q) - surface_.level;
}

double LevelSurfaceAnalyzer::d1(std::span<const double> q) const {
  const PointEval e = evaluate(q);
  return std::hypot(e.x1f, e.x2f);
}

HorizontalNormalData LevelSurfaceAnalyzer::horizontal_normal(std::span<const double> q) const {
  const PointEval e = evaluate(q);
  HorizontalNormalData h;
  h.x1f = e.x1f;
  h.x2f = e.x2f;
  h.x3f = e.x3f;
  h.d1 = std::hypot(e.x1f, e.x2f);
  h.d0 = std::hypot(h.d1, e.x3f);
  if (norm3(e.grad_f) <= 1e-12)
    throw NumericError("level function has vanishing differential at the queried point");
  for (int k = 0; k < 3; ++k)
    h.normal_chart[k] = (e.x1f * e.x1[k] + e.x2f * e.x2[k] + e.x3f * e.reeb[k]) / h.d0;
  h.characteristic = h.d1 < kCharacteristicEps;
  if (!h.characteristic) {
    h.nu1 = e.x1f / h.d1;
    h.nu2 = e.x2f / h.d1;
    for (int k = 0; k < 3; ++k) h.nu_chart[k] = h.nu1 * e.x1[k] + h.nu2 * e.x2[k];
  }
  return h;
}

double LevelSurfaceAnalyzer::minimal_residual(std::span<const double> q) const {
  const PointEval e = evaluate(q);
  const double d1 = std::hypot(e.x1f, e.x2f);
  if (d1 < kCharacteristicEps)
    throw NumericError("curvature residual is undefined at a characteristic point");
  const StructuralConstants c = structure_->structural_constants(q);
  const double numerator =
      e.x11f * e.x2f * e.x2f + e.x22f * e.x1f * e.x1f - e.x1f * e.x2f * (e.x12f + e.x21f);
  const double correction = c.at(0, 1, 1) * e.x1f - c.at(0, 1, 0) * e.x2f;
  return numerator / (d1 * d1 * d1) + correction / d1;
}

void LevelSurfaceAnalyzer::newton_values(std::span<const double> q, std::array<double, 3>& r,
                                         std::array<std::array<double, 3>, 3>& jac) const {
  std::vector<double> out = newton_.evaluate(q);
  r = {out[0] - surface_.level, out[1], out[2]};
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k) jac[i][k] = out[3 + 3 * i + k];
}

/* Levenberg-Marquardt on (F - c, X1 F, X2 F). Handles the rank-deficient
   Jacobians that appear when the characteristic set is a curve, where plain
   Newton has no well-defined step. */
bool LevelSurfaceAnalyzer::refine_root(std::array<double, 3>& p) const {
  std::array<double, 3> r;
  std::array<std::array<double, 3>, 3> jac;
  newton_values(p, r, jac);
  double cost = dot3(r, r);
  double lambda = 1e-3;

  for (int iter = 0; iter < 80; ++iter) {
    const double rmax = std::max({std::fabs(r[0]), std::fabs(r[1]), std::fabs(r[2])});
    if (rmax <= 1e-13) break;

    Mat a(3, 3);
    std::array<double, 3> g{};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        double s = 0;
        for (int k = 0; k < 3; ++k) s += jac[k][i] * jac[k][j];
        a(i, j) = s;
      }
    for (int i = 0; i < 3; ++i)
      for (int k = 0; k < 3; ++k) g[i] += jac[k][i] * r[k];
    const double scale = std::max({a(0, 0), a(1, 1), a(2, 2), 1e-30});
    for (int i = 0; i < 3; ++i) a(i, i) += lambda * scale;

    std::array<double, 3> delta = {-g[0], -g[1], -g[2]};
    if (!solve(a, delta)) {
      lambda *= 10;
      if (lambda > 1e12) break;
      continue;
    }
    const std::array<double, 3> trial = {p[0] + delta[0], p[1] + delta[1], p[2] + delta[2]};
    std::array<double, 3> rt;
    std::array<std::array<double, 3>, 3> jt;
    newton_values(trial, rt, jt);
    const double ct = dot3(rt, rt);
    if (ct < cost) {
      p = trial;
      r = rt;
      jac = jt;
      cost = ct;
      lambda = std::max(lambda / 8, 1e-13);
    } else {
      lambda *= 10;
      if (lambda > 1e12) break;
    }
  }
  return std::max({std::fabs(r[0]), std::fabs(r[1]), std::fabs(r[2])}) <= 1e-10;
}

std::vector<std::array<double, 3>> LevelSurfaceAnalyzer::find_characteristic_points(
    const SearchBox& box, std::size_t resolution) const {
  if (resolution < 2) throw std::invalid_argument("find_characteristic_points: resolution < 2");
  for (int k = 0; k < 3; ++k)
    if (!(box.lo[k] < box.hi[k]))
      throw std::invalid_argument("find_characteristic_points: empty box");

  const std::vector<double> gx = linspace(box.lo[0], box.hi[0], resolution);
  const std::vector<double> gy = linspace(box.lo[1], box.hi[1], resolution);
  const std::vector<double> gz = linspace(box.lo[2], box.hi[2], resolution);

  const std::size_t n = resolution;
  std::vector<double> cost(n * n * n);
  const auto at = [&](std::size_t i, std::size_t j, std::size_t k) { return (i * n + j) * n + k; };
  std::array<double, 3> r;
  std::array<std::array<double, 3>, 3> jac;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) {
        const std::array<double, 3> p = {gx[i], gy[j], gz[k]};
        newton_values(p, r, jac);
        cost[at(i, j, k)] = dot3(r, r);
      }

  // Seeds: grid nodes not exceeded by any axis neighbor. `<=` keeps whole
  // plateaus, which is what catches characteristic curves.
  struct Seed {
    double cost;
    std::array<double, 3> p;
  };
  std::vector<Seed> seeds;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) {
        const double v = cost[at(i, j, k)];
        bool is_min = true;
        if (i > 0 && cost[at(i - 1, j, k)] < v) is_min = false;
        if (i + 1 < n && cost[at(i + 1, j, k)] < v) is_min = false;
        if (j > 0 && cost[at(i, j - 1, k)] < v) is_min = false;
        if (j + 1 < n && cost[at(i, j + 1, k)] < v) is_min = false;
        if (k > 0 && cost[at(i, j, k - 1)] < v) is_min = false;
        if (k + 1 < n && cost[at(i, j, k + 1)] < v) is_min = false;
        if (is_min) seeds.push_back({v, {gx[i], gy[j], gz[k]}});
      }
  std::stable_sort(seeds.begin(), seeds.end(),
                   [](const Seed& a, const Seed& b) { return a.cost < b.cost; });
  if (seeds.size() > 200) seeds.resize(200);

  std::vector<std::array<double, 3>> roots;
  const double slack =
      1e-7 * std::max({box.hi[0] - box.lo[0], box.hi[1] - box.lo[1], box.hi[2] - box.lo[2]});
  for (const Seed& s : seeds) {
    std::array<double, 3> p = s.p;
    if (!refine_root(p)) continue;
    if (!inside(box, p, slack)) continue;
    bool dup = false;
    for (const auto& q : roots)
      if (std::hypot(p[0] - q[0], p[1] - q[1], p[2] - q[2]) < 1e-6) {
        dup = true;
        break;
      }
    if (!dup) roots.push_back(p);
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

CharPointReport LevelSurfaceAnalyzer::classify_characteristic_point(std::span<const double> q,
                                                                    double loop_radius) const {
  if (!(loop_radius > 0)) throw std::invalid_argument("classify: loop radius must be positive");
  const PointEval e = evaluate(q);
  if (std::hypot(e.x1f, e.x2f) > 1e-6)
    throw std::invalid_argument("classify: point is not characteristic");

  CharPointReport rep;
  rep.location = to3(q);
  rep.a = {{{e.x11f, e.x21f}, {e.x12f, e.x22f}}};
  rep.det_a = e.x11f * e.x22f - e.x21f * e.x12f;
  rep.trace_a = e.x11f + e.x22f;
  const double amax = std::max({std::fabs(e.x11f), std::fabs(e.x21f), std::fabs(e.x12f),
                                std::fabs(e.x22f)});
  const double eps_a = 1e-6 * amax;
  rep.kind = std::fabs(rep.det_a) > eps_a ? CharPointReport::Kind::Isolated
                                          : CharPointReport::Kind::SingularCurveCandidate;
  if (rep.kind != CharPointReport::Kind::Isolated) return rep;

  // Index of the horizontal gradient: walk a surface loop around the point,
  // read the field in the fixed basis (u, v) = (X1, X2)(q), count turns.
  const std::array<double, 3> u = e.x1;
  const std::array<double, 3> v = e.x2;
  const double guu = dot3(u, u), guv = dot3(u, v), gvv = dot3(v, v);
  const double gram_det = guu * gvv - guv * guv;
  if (gram_det <= 0) throw NumericError("classify: frame degenerates at the point");

  constexpr int kLoopPoints = 64;
  double radius = loop_radius;
  for (int attempt = 0; attempt < 2; ++attempt) {
    std::array<std::array<double, 2>, kLoopPoints> field;
    double mmin = std::numeric_limits<double>::infinity();
    double mmax = 0;
    for (int s = 0; s < kLoopPoints; ++s) {
      const double th = 2.0 * std::numbers::pi * s / kLoopPoints;
      std::array<double, 3> p;
      for (int k = 0; k < 3; ++k)
        p[k] = rep.location[k] + radius * (std::cos(th) * u[k] + std::sin(th) * v[k]);
      // One Newton projection onto the surface; the loop radius is small
      // enough that a single step leaves only O(radius^4) defect.
      PointEval pe = evaluate(p);
      const double gn = dot3(pe.grad_f, pe.grad_f);
      if (gn > 0) {
        const double step = (pe.f - surface_.level) / gn;
        for (int k = 0; k < 3; ++k) p[k] -= step * pe.grad_f[k];
        pe = evaluate(p);
      }
      // Least-squares components of x1f*X1(p) + x2f*X2(p) in span(u, v).
      std::array<double, 3> g;
      for (int k = 0; k < 3; ++k) g[k] = pe.x1f * pe.x1[k] + pe.x2f * pe.x2[k];
      const double bu = dot3(g, u), bv = dot3(g, v);
      const double a = (bu * gvv - bv * guv) / gram_det;
      const double b = (bv * guu - bu * guv) / gram_det;
      field[s] = {a, b};
      const double m = std::hypot(a, b);
      mmin = std::min(mmin, m);
      mmax = std::max(mmax, m);
    }
    if (mmax > 0 && mmin > 1e-6 * mmax) {
      double total = 0;
      for (int s = 0; s < kLoopPoints; ++s) {
        const auto& c0 = field[s];
        const auto& c1 = field[(s + 1) % kLoopPoints];
        double dth = std::atan2(c1[1], c1[0]) - std::atan2(c0[1], c0[0]);
        if (dth > std::numbers::pi) dth -= 2.0 * std::numbers::pi;
        if (dth <= -std::numbers::pi) dth += 2.0 * std::numbers::pi;
        total += dth;
      }
      const double w = total / (2.0 * std::numbers::pi);
      const int index = static_cast<int>(std::lround(w));
      if (std::fabs(w - index) > 0.1)
        throw NumericError("classify: winding number did not converge");
      const int expected = rep.det_a > 0 ? 1 : -1;
      if (index != expected)
        throw NumericError("classify: winding disagrees with the linearization");
      rep.index = index;
      return rep;
    }
    radius *= 0.25;  // loop grazed another characteristic point
  }
  throw NumericError("classify: winding loop keeps crossing characteristic points");
}

std::vector<std::array<double, 3>> LevelSurfaceAnalyzer::trace_singular_curve(
    std::span<const double> start, const SearchBox& box, double step,
    std::size_t max_steps) const {
  if (!(step > 0)) throw std::invalid_argument("trace_singular_curve: step must be positive");
  std::array<double, 3> origin = to3(start);
  if (!refine_root(origin))
    throw std::invalid_argument("trace_singular_curve: seed does not refine to a characteristic point");

  std::array<double, 3> r;
  std::array<std::array<double, 3>, 3> jac;

  const auto tangent_at = [&](const std::array<double, 3>& p) -> std::array<double, 3> {
    newton_values(p, r, jac);
    std::array<double, 3> best{};
    double best_norm = 0;
    const int pairs[3][2] = {{0, 1}, {0, 2}, {1, 2}};
    for (const auto& pr : pairs) {
      const std::array<double, 3> t = cross3(jac[pr[0]], jac[pr[1]]);
      const double nt = norm3(t);
      if (nt > best_norm) {
        best_norm = nt;
        best = t;
      }
    }
    double jscale = 0;
    for (const auto& row : jac) jscale = std::max(jscale, norm3(row));
    if (best_norm <= 1e-10 * jscale * jscale) return {0, 0, 0};  // rank < 2, direction lost
    for (double& c : best) c /= best_norm;
    return best;
  };

  // Gauss-Newton corrector with a minimal-norm step: the gradient lives in
  // the row space of the Jacobian, so the damped normal equations cannot
  // slide the point along the curve.
  const auto correct = [&](std::array<double, 3>& p) -> bool {
    for (int iter = 0; iter < 8; ++iter) {
      newton_values(p, r, jac);
      if (std::max({std::fabs(r[0]), std::fabs(r[1]), std::fabs(r[2])}) <= 1e-10) return true;
      Mat a(3, 3);
      std::array<double, 3> g{};
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
          double s = 0;
          for (int k = 0; k < 3; ++k) s += jac[k][i] * jac[k][j];
          a(i, j) = s;
        }
      for (int i = 0; i < 3; ++i)
        for (int k = 0; k < 3; ++k) g[i] += jac[k][i] * r[k];
      const double scale = std::max({a(0, 0), a(1, 1), a(2, 2), 1e-30});
      for (int i = 0; i < 3; ++i) a(i, i) += 1e-10 * scale;
      std::array<double, 3> delta = {-g[0], -g[1], -g[2]};
      if (!solve(a, delta)) return false;
      for (int k = 0; k < 3; ++k) p[k] += delta[k];
    }
    newton_values(p, r, jac);
    return std::max({std::fabs(r[0]), std::fabs(r[1]), std::fabs(r[2])}) <= 1e-10;
  };

  std::vector<std::array<double, 3>> forward, backward;
  for (int dir : {+1, -1}) {
    std::vector<std::array<double, 3>>& side = dir > 0 ? forward : backward;
    std::array<double, 3> p = origin;
    std::array<double, 3> prev_t{};
    bool have_prev = false;
    bool closed = false;
    for (std::size_t i = 0; i < max_steps && !closed; ++i) {
      std::array<double, 3> t = tangent_at(p);
      if (t == std::array<double, 3>{0, 0, 0}) break;
      if (have_prev) {
        if (dot3(t, prev_t) < 0)
          for (double& c : t) c = -c;
      } else if (dir < 0) {
        for (double& c : t) c = -c;
      }
      double h = step;
      bool advanced = false;
      for (int attempt = 0; attempt < 3; ++attempt, h *= 0.5) {
        std::array<double, 3> p2;
        for (int k = 0; k < 3; ++k) p2[k] = p[k] + h * t[k];
        if (correct(p2)) {
          p = p2;
          prev_t = t;
          have_prev = true;
          advanced = true;
          break;
        }
      }
      if (!advanced) break;
      side.push_back(p);
      if (!inside(box, p, 1e-12)) break;
      if (i >= 10 &&
          std::hypot(p[0] - origin[0], p[1] - origin[1], p[2] - origin[2]) < 0.75 * step) {
        closed = true;
      }
    }
    if (closed) {
      backward.clear();
      break;
    }
  }

  std::vector<std::array<double, 3>> out;
  out.reserve(backward.size() + 1 + forward.size());
  for (auto it = backward.rbegin(); it != backward.rend(); ++it) out.push_back(*it);
  out.push_back(origin);
  for (const auto& p : forward) out.push_back(p);
  return out;
}

}  // namespace srmin

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <vector>

#include "core/presets.hpp"
#include "expr/parser.hpp"
#include "surface/area.hpp"
#include "surface/level.hpp"
#include "surface/mesh.hpp"
#include "util.hpp"

using namespace srmin;

namespace {

using Vec3 = std::array<double, 3>;

LevelSurfaceAnalyzer make_analyzer(std::shared_ptr<const SRStructure> s, const std::string& f,
                                   double level = 0.0) {
  expr::ExprPtr e = expr::parse_expression(f, s->chart());
  return LevelSurfaceAnalyzer(std::move(s), LevelSurface{std::move(e), level});
}

/* Curvature residual rebuilt from nested finite differences of the raw
   level-function evaluation along the frame fields; shares nothing with the
   symbolic derivative pipeline. */
template <class G>
double fd_along(const SRStructure& s, std::size_t i, const G& g, const Vec3& p, double h) {
  const std::vector<double> v = s.frame_field(i).at(p);
  Vec3 pp, pm;
  for (int k = 0; k < 3; ++k) {
    pp[k] = p[k] + h * v[k];
    pm[k] = p[k] - h * v[k];
  }
  return (g(pp) - g(pm)) / (2.0 * h);
}

double oracle_residual(const SRStructure& s, const expr::ExprPtr& f, const Vec3& p) {
  const double h = 1e-4;
  const auto fv = [&](const Vec3& q) { return expr::evaluate(f, q); };
  const auto g1 = [&](const Vec3& q) { return fd_along(s, 0, fv, q, h); };
  const auto g2 = [&](const Vec3& q) { return fd_along(s, 1, fv, q, h); };
  const double x1f = g1(p), x2f = g2(p);
  const double x11f = fd_along(s, 0, g1, p, h);
  const double x21f = fd_along(s, 1, g1, p, h);
  const double x12f = fd_along(s, 0, g2, p, h);
  const double x22f = fd_along(s, 1, g2, p, h);
  const double d1 = std::hypot(x1f, x2f);
  const StructuralConstants c = s.structural_constants(p);
  const double num = x11f * x2f * x2f + x22f * x1f * x1f - x1f * x2f * (x12f + x21f);
  return num / (d1 * d1 * d1) + (c.at(0, 1, 1) * x1f - c.at(0, 1, 0) * x2f) / d1;
}

SurfaceMesh annulus_mesh(const LevelSurfaceAnalyzer& an, std::size_t n_s, std::size_t n_t,
                         double r0 = 0.05, double r1 = 1.0) {
  const auto point = [](double th, double r) -> Vec3 {
    return {r * std::cos(th), r * std::sin(th), 0.0};
  };
  const auto d1_of = [&](const Vec3& p) { return an.d1(p); };
  return build_patch(point, linspace(0.0, 2.0 * std::numbers::pi, n_s), linspace(r0, r1, n_t),
                     d1_of);
}

}  // namespace

TEST_CASE("curvature residual matches a finite-difference oracle") {
  struct Case {
    std::shared_ptr<const SRStructure> s;
    std::string f;
  };
  const std::vector<Case> cases = {
      {heisenberg_structure(1), "z - x*y"},
      {heisenberg_structure(1), "z + x^2*y - sin(x)"},
      {rototranslation_structure(), "x*cos(z) + y*sin(z)"},
      {rototranslation_structure(), "x^2*y - 0.5*z + sin(x)"},
  };
  testutil::Rng rng(20240817);
  for (const Case& kase : cases) {
    const LevelSurfaceAnalyzer an = make_analyzer(kase.s, kase.f);
    const expr::ExprPtr f = expr::parse_expression(kase.f, kase.s->chart());
    int checked = 0;
    while (checked < 8) {
      const Vec3 p = {rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5)};
      if (an.d1(p) < 0.2) continue;
      const double got = an.minimal_residual(p);
      const double want = oracle_residual(*kase.s, f, p);
      CHECK(std::fabs(got - want) <= 1e-5 * std::max(1.0, std::fabs(want)));
      ++checked;
    }
  }
}

TEST_CASE("curvature residual: frozen value on a non-minimal graph") {
  const LevelSurfaceAnalyzer an = make_analyzer(heisenberg_structure(1), "z - x*y");
  const Vec3 p = {1.0, 1.0, 1.0};
  const double expected = 12.0 / (10.0 * std::sqrt(10.0));
  CHECK(std::fabs(an.minimal_residual(p) - expected) <= 1e-12);
}

TEST_CASE("curvature residual vanishes on the known minimal families") {
  testutil::Rng rng(7141);
  int total = 0;

  SUBCASE("nilpotent: horizontal plane") {
    const LevelSurfaceAnalyzer an = make_analyzer(heisenberg_structure(1), "z");
    while (total < 60) {
      const double th = rng.uniform(0.0, 2.0 * std::numbers::pi);
      const double r = rng.uniform(0.25, 2.0);
      const Vec3 p = {r * std::cos(th), r * std::sin(th), 0.0};
      REQUIRE(an.d1(p) >= 0.1);
      CHECK(std::fabs(an.minimal_residual(p)) <= 1e-10);
      ++total;
    }
  }

  SUBCASE("rototranslation: shifted-graph family") {
    for (int rep = 0; rep < 4; ++rep) {
      const double b = rng.uniform(-2.0, 2.0);
      const double c = rng.uniform(-1.0, 1.0);
      char buf[128];
      std::snprintf(buf, sizeof(buf), "y - x - (%.17g)*(sin(z) + cos(z)) - (%.17g)", b, c);
      const LevelSurfaceAnalyzer an = make_analyzer(rototranslation_structure(), buf);
      int pts = 0;
      while (pts < 15) {
        const double x = rng.uniform(-2.0, 2.0);
        const double z = rng.uniform(-3.0, 3.0);
        const Vec3 p = {x, x + b * (std::sin(z) + std::cos(z)) + c, z};
        if (an.d1(p) < 0.1) continue;
        REQUIRE(std::fabs(an.level_value(p)) <= 1e-12);
        CHECK(std::fabs(an.minimal_residual(p)) <= 1e-10);
        ++pts;
      }
    }
  }

  SUBCASE("rototranslation: linear-in-x family") {
    const LevelSurfaceAnalyzer an =
        make_analyzer(rototranslation_structure(), "0.8*x + 1.3*sin(z)");
    int pts = 0;
    while (pts < 60) {
      const double z = rng.uniform(-3.0, 3.0);
      const double x = -1.3 * std::sin(z) / 0.8;  // point on the zero level
      const Vec3 p = {x, rng.uniform(-2.0, 2.0), z};
      if (an.d1(p) < 0.1) continue;
      REQUIRE(std::fabs(an.level_value(p)) <= 1e-12);
      CHECK(std::fabs(an.minimal_residual(p)) <= 1e-10);
      ++pts;
    }
  }

  SUBCASE("rototranslation: ruled zero level") {
    const LevelSurfaceAnalyzer an =
        make_analyzer(rototranslation_structure(), "x*cos(z) + y*sin(z)");
    for (int pts = 0; pts < 60; ++pts) {
      const double z = rng.uniform(-3.0, 3.0);
      const double t = rng.uniform(-2.0, 2.0);
      const Vec3 p = {-t * std::sin(z), t * std::cos(z), z};
      REQUIRE(an.d1(p) >= 1.0);  // X1 F == 1 everywhere
      REQUIRE(std::fabs(an.level_value(p)) <= 1e-12);
      CHECK(std::fabs(an.minimal_residual(p)) <= 1e-10);
    }
  }

  SUBCASE("rototranslation: nonzero level of the ruled family is not minimal") {
    const double c = 0.7;
    const LevelSurfaceAnalyzer an =
        make_analyzer(rototranslation_structure(), "x*cos(z) + y*sin(z)", c);
    const double z = 0.3, u = 0.9;
    const Vec3 p = {c * std::cos(z) - u * std::sin(z), c * std::sin(z) + u * std::cos(z), z};
    REQUIRE(std::fabs(an.level_value(p)) <= 1e-12);
    const double d1 = std::sqrt(1.0 + u * u);
    CHECK(std::fabs(an.minimal_residual(p) - (-c / (d1 * d1 * d1))) <= 1e-12);
  }
}

TEST_CASE("curvature residual refuses characteristic points") {
  const LevelSurfaceAnalyzer an = make_analyzer(heisenberg_structure(1), "z");
  CHECK_THROWS_AS(an.minimal_residual(Vec3{1e-9, 0.0, 0.0}), NumericError);
  CHECK_NOTHROW(an.minimal_residual(Vec3{0.1, 0.1, 0.0}));
}

TEST_CASE("horizontal normal") {
  SUBCASE("nilpotent plane: frame and chart components") {
    const LevelSurfaceAnalyzer an = make_analyzer(heisenberg_structure(1), "z");
    const HorizontalNormalData h = an.horizontal_normal(Vec3{1.0, 0.0, 0.0});
    CHECK(!h.characteristic);
    CHECK(h.x1f == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(h.x2f == doctest::Approx(-0.5));
    CHECK(h.x3f == doctest::Approx(1.0));
    CHECK(h.d1 == doctest::Approx(0.5));
    CHECK(h.d0 == doctest::Approx(std::sqrt(5.0) / 2.0));
    CHECK(h.nu1 == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(h.nu2 == doctest::Approx(-1.0));
    // nu = -X2 at this point
    CHECK(h.nu_chart[0] == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(h.nu_chart[1] == doctest::Approx(-1.0));
    CHECK(h.nu_chart[2] == doctest::Approx(0.5));
    CHECK(h.normal_chart[0] == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(h.normal_chart[1] == doctest::Approx(-1.0 / std::sqrt(5.0)));
    CHECK(h.normal_chart[2] == doctest::Approx(std::sqrt(5.0) / 2.0));
  }

  SUBCASE("characteristic point carries only the transverse normal") {
    const LevelSurfaceAnalyzer an = make_analyzer(heisenberg_structure(1), "z");
    const HorizontalNormalData h = an.horizontal_normal(Vec3{0.0, 0.0, 0.0});
    CHECK(h.characteristic);
    CHECK(h.nu1 == 0.0);
    CHECK(h.nu2 == 0.0);
    CHECK(h.nu_chart == Vec3{0.0, 0.0, 0.0});
    CHECK(h.normal_chart[2] == doctest::Approx(1.0));
  }

  SUBCASE("surface ruled by the transverse field has x3f = 0") {
    const LevelSurfaceAnalyzer an =
        make_analyzer(rototranslation_structure(), "x*cos(z) + y*sin(z)");
    testutil::Rng rng(99);
    for (int i = 0; i < 10; ++i) {
      const Vec3 p = {rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0), rng.uniform(-3.0, 3.0)};
      const HorizontalNormalData h = an.horizontal_normal(p);
      CHECK(std::fabs(h.x3f) <= 1e-13);
      for (int k = 0; k < 3; ++k) CHECK(h.normal_chart[k] == doctest::Approx(h.nu_chart[k]));
    }
  }

  SUBCASE("vanishing differential is rejected") {
    const LevelSurfaceAnalyzer an = make_analyzer(heisenberg_structure(1), "x^2 + y^2 + z^2");
    CHECK_THROWS_AS(an.horizontal_normal(Vec3{0.0, 0.0, 0.0}), NumericError);
  }
}

TEST_CASE("characteristic points: isolated zeros in the nilpotent structure") {
  const SearchBox box{{-1.0, -1.0, -1.0}, {1.0, 1.0, 1.0}};

  SUBCASE("horizontal plane: single elliptic point") {
    const LevelSurfaceAnalyzer an = make_analyzer(heisenberg_structure(1), "z");
    const auto pts = an.find_characteristic_points(box);
    REQUIRE(pts.size() == 1);
    CHECK(std::hypot(pts[0][0], pts[0][1], pts[0][2]) <= 1e-9);

    const CharPointReport rep = an.classify_characteristic_point(pts[0]);
    CHECK(rep.kind == CharPointReport::Kind::Isolated);
    CHECK(std::fabs(rep.a[0][0] - 0.0) <= 1e-9);
    CHECK(std::fabs(rep.a[0][1] - 0.5) <= 1e-9);
    CHECK(std::fabs(rep.a[1][0] + 0.5) <= 1e-9);
    CHECK(std::fabs(rep.a[1][1] - 0.0) <= 1e-9);
    CHECK(rep.det_a == doctest::Approx(0.25));
    CHECK(std::fabs(rep.trace_a) <= 1e-9);
    REQUIRE(rep.index.has_value());
    CHECK(*rep.index == 1);
  }

  SUBCASE("saddle graph: index -1") {
    const LevelSurfaceAnalyzer an = make_analyzer(heisenberg_structure(1), "z - x*y");
    const auto pts = an.find_characteristic_points(box);
    REQUIRE(pts.size() == 1);
    CHECK(std::hypot(pts[0][0], pts[0][1], pts[0][2]) <= 1e-9);

    const CharPointReport rep = an.classify_characteristic_point(pts[0]);
    CHECK(rep.kind == CharPointReport::Kind::Isolated);
    CHECK(rep.det_a == doctest::Approx(-0.75));
    REQUIRE(rep.index.has_value());
    CHECK(*rep.index == -1);
  }
}

TEST_CASE("characteristic points: degenerate line families") {
  SUBCASE("rototranslation x + sin(z): two line families in the box") {
    const LevelSurfaceAnalyzer an = make_analyzer(rototranslation_structure(), "x + sin(z)");
    const SearchBox box{{-1.5, -1.0, -7.0}, {1.5, 1.0, 7.0}};
    const auto pts = an.find_characteristic_points(box, 13);
    REQUIRE(pts.size() >= 6);
    bool saw_minus = false, saw_plus = false;
    for (const Vec3& p : pts) {
      CHECK(std::fabs(p[0] + std::sin(p[2])) <= 1e-10);
      CHECK(std::fabs(std::cos(p[2])) <= 1e-8);
      if (p[0] < 0) saw_minus = true;
      if (p[0] > 0) saw_plus = true;

      const CharPointReport rep = an.classify_characteristic_point(p);
      CHECK(rep.kind == CharPointReport::Kind::SingularCurveCandidate);
      CHECK(std::fabs(rep.det_a) <= 1e-9);
      CHECK(!rep.index.has_value());
    }
    CHECK(saw_minus);
    CHECK(saw_plus);
  }

  SUBCASE("surface without characteristic points") {
    const LevelSurfaceAnalyzer an =
        make_analyzer(rototranslation_structure(), "x*cos(z) + y*sin(z)");
    const SearchBox box{{-1.0, -1.0, -1.0}, {1.0, 1.0, 1.0}};
    CHECK(an.find_characteristic_points(box).empty());
  }
}

TEST_CASE("characteristic index survives swapping the frame fields") {
  // Same distribution, opposite frame order; the induced orientation flips
  // but the index of an elliptic point must not.
  expr::Chart chart({"x", "y", "z"});
  VectorFieldExpr x1{{expr::parse_expression("0", chart), expr::parse_expression("1", chart),
                      expr::parse_expression("-x/2", chart)}};
  VectorFieldExpr x2{{expr::parse_expression("1", chart), expr::parse_expression("0", chart),
                      expr::parse_expression("y/2", chart)}};
  auto swapped = SRStructure::build(chart, {x1, x2});
  const LevelSurfaceAnalyzer an(swapped, LevelSurface{expr::parse_expression("z", chart), 0.0});

  const CharPointReport rep = an.classify_characteristic_point(Vec3{0.0, 0.0, 0.0});
  CHECK(rep.kind == CharPointReport::Kind::Isolated);
  CHECK(rep.det_a == doctest::Approx(0.25));
  REQUIRE(rep.index.has_value());
  CHECK(*rep.index == 1);
}

TEST_CASE("singular curve tracer") {
  SUBCASE("rototranslation line x = -sin(z), cos(z) = 0") {
    const LevelSurfaceAnalyzer an = make_analyzer(rototranslation_structure(), "x + sin(z)");
    const SearchBox box{{-1.5, -1.0, 0.0}, {1.5, 1.0, 3.0}};
    const Vec3 seed = {-1.0 + 1e-3, 0.0, std::numbers::pi / 2 - 1e-3};
    const auto curve = an.trace_singular_curve(seed, box, 1e-2);
    REQUIRE(curve.size() >= 100);
    double ymin = 1e300, ymax = -1e300;
    for (const Vec3& p : curve) {
      CHECK(std::fabs(p[0] + 1.0) <= 1e-7);
      CHECK(std::fabs(p[2] - std::numbers::pi / 2) <= 1e-7);
      ymin = std::min(ymin, p[1]);
      ymax = std::max(ymax, p[1]);
    }
    CHECK(ymin <= -0.99);
    CHECK(ymax >= 0.99);
  }

  SUBCASE("nilpotent graph with a characteristic line") {
    const LevelSurfaceAnalyzer an = make_analyzer(heisenberg_structure(1), "z - x*y/2");
    const SearchBox box{{-1.0, -1.0, -1.0}, {1.0, 1.0, 1.0}};
    const auto curve = an.trace_singular_curve(Vec3{0.0, 0.2, 0.0}, box, 1e-2);
    REQUIRE(curve.size() >= 100);
    double ymin = 1e300, ymax = -1e300;
    for (const Vec3& p : curve) {
      CHECK(std::fabs(p[0]) <= 1e-8);
      CHECK(std::fabs(p[2]) <= 1e-8);
      ymin = std::min(ymin, p[1]);
      ymax = std::max(ymax, p[1]);
    }
    CHECK(ymin <= -0.99);
    CHECK(ymax >= 0.99);
  }

  SUBCASE("seed far from the characteristic set is rejected") {
    const LevelSurfaceAnalyzer an =
        make_analyzer(rototranslation_structure(), "x*cos(z) + y*sin(z)");
    const SearchBox box{{-1.0, -1.0, -1.0}, {1.0, 1.0, 1.0}};
    CHECK_THROWS_AS(an.trace_singular_curve(Vec3{0.0, 0.0, 0.0}, box, 1e-2),
                    std::invalid_argument);
  }
}

TEST_CASE("horizontal area of the flat annulus") {
  const auto h1 = heisenberg_structure(1);
  const LevelSurfaceAnalyzer an = make_analyzer(h1, "z");

  SUBCASE("local density is half the distance from the axis") {
    const double d = 1e-3;
    const auto point = [&](double s, double t) -> Vec3 { return {s, t, 0.0}; };
    const SurfaceMesh tiny =
        build_patch(point, linspace(0.6 - d, 0.6 + d, 3), linspace(0.8 - d, 0.8 + d, 3));
    const double got = horizontal_area(*h1, tiny);
    const double expected = 0.5 * 1.0 * (2 * d) * (2 * d);  // r = 1 at the center
    CHECK(std::fabs(got - expected) <= 1e-5 * expected);
  }

  SUBCASE("annulus area") {
    const SurfaceMesh mesh = annulus_mesh(an, 193, 97);
    const double exact = std::numbers::pi / 3.0 * (1.0 - std::pow(0.05, 3));
    const double got = horizontal_area(*h1, mesh);
    CHECK(std::fabs(got - exact) <= 5e-4 * exact);
  }

  SUBCASE("characteristic vertices are rejected when flagged") {
    const SurfaceMesh disk = annulus_mesh(an, 17, 9, 0.0, 1.0);  // includes the center
    CHECK_THROWS_AS(horizontal_area(*h1, disk), NumericError);
  }
}

TEST_CASE("cylinder volume rate") {
  const auto h1 = heisenberg_structure(1);
  const LevelSurfaceAnalyzer an = make_analyzer(h1, "z");
  const SurfaceMesh mesh = annulus_mesh(an, 97, 49);
  const double area = horizontal_area(*h1, mesh);

  const auto phi_star = [&](const Vec3& p) {
    const HorizontalNormalData h = an.horizontal_normal(p);
    return std::atan2(h.nu2, h.nu1);
  };

  SUBCASE("flow along the horizontal normal reproduces the area") {
    const double rate = cylinder_volume_rate(*h1, mesh, phi_star, 1e-3);
    CHECK(std::fabs(rate - area) <= 5e-3 * area);
    const double exact = std::numbers::pi / 3.0 * (1.0 - std::pow(0.05, 3));
    CHECK(std::fabs(rate - exact) <= 5e-3 * exact);

    // first-order convergence: the defect shrinks with epsilon
    const double rate4 = cylinder_volume_rate(*h1, mesh, phi_star, 4e-3);
    CHECK(std::fabs(rate - area) < std::fabs(rate4 - area));
  }

  SUBCASE("every other direction field sweeps less volume") {
    const double best = cylinder_volume_rate(*h1, mesh, phi_star, 1e-3);
    testutil::Rng rng(31337);
    for (int i = 0; i < 20; ++i) {
      const double phi = rng.uniform(0.0, 2.0 * std::numbers::pi);
      const double rate =
          cylinder_volume_rate(*h1, mesh, [&](const Vec3&) { return phi; }, 1e-3);
      CHECK(rate <= best + 1e-6);
    }
  }

  SUBCASE("per-vertex phi channel matches the callable bit for bit") {
    SurfaceMesh with_phi = mesh;
    with_phi.phi.resize(with_phi.vertex_count());
    for (std::size_t i = 0; i < with_phi.vertex_count(); ++i)
      with_phi.phi[i] = phi_star(with_phi.vertices[i]);
    const double via_channel = cylinder_volume_rate(*h1, with_phi, nullptr, 1e-3);
    const double via_callable = cylinder_volume_rate(*h1, mesh, phi_star, 1e-3);
    CHECK(via_channel == via_callable);
  }

  SUBCASE("input validation") {
    CHECK_THROWS_AS(cylinder_volume_rate(*h1, mesh, phi_star, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(cylinder_volume_rate(*h1, mesh, nullptr, 1e-3), std::invalid_argument);
  }
}

TEST_CASE("area is stationary on minimal surfaces and not on others") {
  const auto h1 = heisenberg_structure(1);
  const double eps = 3e-3;

  const auto bump = [](const SurfaceMesh& m, std::size_t s, std::size_t t) {
    const double u = static_cast<double>(s) / static_cast<double>(m.n_s - 1);
    const double v = static_cast<double>(t) / static_cast<double>(m.n_t - 1);
    const double su = std::sin(std::numbers::pi * u);
    const double sv = std::sin(std::numbers::pi * v);
    return su * su * sv * sv;
  };

  SUBCASE("flat annulus: no first-order decrease") {
    const LevelSurfaceAnalyzer an = make_analyzer(h1, "z");
    const SurfaceMesh mesh = annulus_mesh(an, 65, 33);
    const double a0 = horizontal_area(*h1, mesh);
    testutil::Rng rng(555);
    for (int trial = 0; trial < 5; ++trial) {
      Vec3 dir = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
      const double nd = std::hypot(dir[0], dir[1], dir[2]);
      for (double& c : dir) c /= nd;
      SurfaceMesh pert = mesh;
      pert.d1.clear();  // vertices move; the cached channel no longer applies
      for (std::size_t s = 0; s < mesh.n_s; ++s)
        for (std::size_t t = 0; t < mesh.n_t; ++t) {
          const double w = eps * bump(mesh, s, t);
          for (int k = 0; k < 3; ++k) pert.vertices[pert.idx(s, t)][k] += w * dir[k];
        }
      const double a = horizontal_area(*h1, pert);
      CHECK(a - a0 >= -1e-5 * a0);
    }
  }

  SUBCASE("non-minimal graph: some perturbation strictly decreases area") {
    const auto point = [](double x, double y) -> Vec3 { return {x, y, x * y}; };
    const SurfaceMesh mesh =
        build_patch(point, linspace(0.3, 1.2, 41), linspace(0.3, 1.2, 41));
    const double a0 = horizontal_area(*h1, mesh);
    double best = 1e300;
    for (double sign : {+1.0, -1.0}) {
      SurfaceMesh pert = mesh;
      for (std::size_t s = 0; s < mesh.n_s; ++s)
        for (std::size_t t = 0; t < mesh.n_t; ++t)
          pert.vertices[pert.idx(s, t)][2] += sign * eps * bump(mesh, s, t);
      best = std::min(best, horizontal_area(*h1, pert) - a0);
    }
    CHECK(best < -2e-5);
  }
}

TEST_CASE("analyzer input validation") {
  const auto h1 = heisenberg_structure(1);
  const expr::Chart& chart = h1->chart();

  CHECK_THROWS_AS(LevelSurfaceAnalyzer(nullptr, LevelSurface{expr::constant(1.0), 0.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(LevelSurfaceAnalyzer(h1, LevelSurface{nullptr, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(LevelSurfaceAnalyzer(heisenberg_structure(2),
                                       LevelSurface{expr::coordinate(0), 0.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(LevelSurfaceAnalyzer(h1, LevelSurface{expr::coordinate(3), 0.0}),
                  std::invalid_argument);

  const LevelSurfaceAnalyzer an = make_analyzer(h1, "z");
  CHECK(an.level_value(Vec3{0.3, 0.4, 0.7}) == 0.7);
  CHECK(an.d1(Vec3{0.6, 0.8, 0.0}) == doctest::Approx(0.5));
  CHECK_THROWS_AS(an.classify_characteristic_point(Vec3{1.0, 1.0, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(an.classify_characteristic_point(Vec3{0.0, 0.0, 0.0}, 0.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(an.find_characteristic_points(SearchBox{{0, 0, 0}, {0, 1, 1}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(an.find_characteristic_points(SearchBox{{-1, -1, -1}, {1, 1, 1}}, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(an.minimal_residual(std::vector<double>{0.0, 0.0}), std::invalid_argument);

  // mesh construction guards
  CHECK_THROWS_AS(build_patch(nullptr, linspace(0, 1, 3), linspace(0, 1, 3)),
                  std::invalid_argument);
  const auto pt = [](double s, double t) -> Vec3 { return {s, t, 0.0}; };
  CHECK_THROWS_AS(build_patch(pt, linspace(0, 1, 1), linspace(0, 1, 3)), std::invalid_argument);
}

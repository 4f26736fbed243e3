#pragma once

#include <array>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "core/structure.hpp"
#include "expr/program.hpp"

namespace srmin {

/* Below this horizontal-gradient norm a surface point counts as
   characteristic: the horizontal normal is undefined there and the
   curvature residual is refused. */
inline constexpr double kCharacteristicEps = 1e-8;

struct LevelSurface {
  expr::ExprPtr f;
  double level = 0.0;
};

struct HorizontalNormalData {
  double x1f = 0, x2f = 0, x3f = 0;  // derivatives of F along X1, X2, Reeb
  double d1 = 0;                     // sqrt(x1f^2 + x2f^2)
  double d0 = 0;                     // sqrt(d1^2 + x3f^2)
  bool characteristic = false;
  double nu1 = 0, nu2 = 0;                     // frame components of the horizontal normal
  std::array<double, 3> nu_chart{};            // horizontal normal, chart components
  std::array<double, 3> normal_chart{};        // full unit normal (Reeb-orthonormal metric)
};

struct CharPointReport {
  enum class Kind { Isolated, SingularCurveCandidate };

  std::array<double, 3> location{};
  std::array<std::array<double, 2>, 2> a{};  // d(X1F, X2F)/d(X1, X2) at the point
  double det_a = 0;
  double trace_a = 0;
  Kind kind = Kind::Isolated;
  std::optional<int> index;  // winding of the horizontal gradient; isolated points only
};

struct SearchBox {
  std::array<double, 3> lo{};
  std::array<double, 3> hi{};
};

/* Pointwise analysis of a level set {F = c} of a 3-dimensional structure:
   horizontal normal, curvature residual, characteristic points and their
   classification. All evaluation methods are const and allocation only;
   safe to call concurrently. */
class LevelSurfaceAnalyzer {
 public:
  LevelSurfaceAnalyzer(std::shared_ptr<const SRStructure> structure, LevelSurface surface);

  const SRStructure& structure() const { return *structure_; }
  const LevelSurface& surface() const { return surface_; }

  // F(q) - c; zero on the surface.
  double level_value(std::span<const double> q) const;

  // sqrt((X1 F)^2 + (X2 F)^2), defined everywhere.
  double d1(std::span<const double> q) const;

  HorizontalNormalData horizontal_normal(std::span<const double> q) const;

  /* Horizontal mean-curvature numerator/D1^3 plus the structure correction;
     zero identically on minimal surfaces. Throws NumericError within
     kCharacteristicEps of a characteristic point. Meaningful on the surface
     itself; callers supply on-surface points. */
  double minimal_residual(std::span<const double> q) const;

  /* All zeros of (F - c, X1 F, X2 F) inside the box, found from a grid of
     local minima of the residual norm refined by Levenberg-Marquardt.
     Results are deduplicated and sorted lexicographically. */
  std::vector<std::array<double, 3>> find_characteristic_points(const SearchBox& box,
                                                                std::size_t resolution = 11) const;

  /* Linearization of the horizontal gradient at a characteristic point.
     det A decides isolated vs singular-curve candidate; isolated points get
     a winding-number index, cross-checked against sign(det A). */
  CharPointReport classify_characteristic_point(std::span<const double> q,
                                                double loop_radius = 0.05) const;

  /* Follows a curve of characteristic points from a seed until it leaves
     the box, closes up, or the step budget runs out. Diagnostic quality:
     predictor along the Jacobian nullspace, Gauss-Newton corrector. */
  std::vector<std::array<double, 3>> trace_singular_curve(std::span<const double> start,
                                                          const SearchBox& box,
                                                          double step = 1e-2,
                                                          std::size_t max_steps = 400) const;

 private:
  struct PointEval {  // one evaluation of eval_ at a point
    double f, x1f, x2f, x3f;
    double x11f, x21f, x12f, x22f;
    std::array<double, 3> grad_f;
    std::array<double, 3> x1, x2, reeb;
  };

  PointEval evaluate(std::span<const double> q) const;
  void newton_values(std::span<const double> q, std::array<double, 3>& r,
                     std::array<std::array<double, 3>, 3>& jac) const;
  bool refine_root(std::array<double, 3>& p) const;

  std::shared_ptr<const SRStructure> structure_;
  LevelSurface surface_;
  expr::Program eval_;    // 20 outputs, see evaluate()
  expr::Program newton_;  // (F, X1F, X2F) and their chart gradients
};

}  // namespace srmin

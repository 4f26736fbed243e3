#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "core/linalg.hpp"
#include "expr/ast.hpp"
#include "expr/chart.hpp"
#include "expr/program.hpp"

namespace srmin {

// Numeric failure distinct from bad input: degenerate frames, singular
// systems, sampling checks that fail.
class NumericError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/* A vector field given by one expression per chart coordinate. */
struct VectorFieldExpr {
  std::vector<expr::ExprPtr> components;

  std::size_t dim() const { return components.size(); }

  std::vector<double> at(std::span<const double> q) const;
};

// Commutator [X, Y]^k = sum_j (X^j d_j Y^k - Y^j d_j X^k), exact and symbolic.
VectorFieldExpr lie_bracket(const VectorFieldExpr& x, const VectorFieldExpr& y);

// Derivative of a scalar expression along a field: sum_j V^j d_j f.
expr::ExprPtr directional_derivative(const VectorFieldExpr& v, const expr::ExprPtr& f);

/* Frame coefficients c_ij^k at one point, defined through
   [E_i, E_j] = -sum_k c_ij^k E_k over the canonical frame (index n-1 is
   the transverse field). Antisymmetric in (i, j). */
struct StructuralConstants {
  std::size_t n = 0;
  std::vector<double> c;  // dense [i][j][k]

  double at(std::size_t i, std::size_t j, std::size_t k) const {
    return c[(i * n + j) * n + k];
  }
};

/* A co-rank-1 orthonormal frame on an n-dimensional chart together with
   everything derived from it: the normalized annihilating one-form (sign
   fixed by the first nonzero curvature pairing at the reference point),
   the transverse Reeb field, and the volume normalization. Immutable
   after construction; safe for concurrent reads. */
class SRStructure {
public:
  struct Options {
    std::vector<double> reference_point;  // defaults to the chart origin
    int sign_override = 0;                // 0 = pick from the reference point
  };

  static std::shared_ptr<const SRStructure> build(expr::Chart chart,
                                                  std::vector<VectorFieldExpr> frame,
                                                  Options opts);
  static std::shared_ptr<const SRStructure> build(expr::Chart chart,
                                                  std::vector<VectorFieldExpr> frame) {
    return build(std::move(chart), std::move(frame), Options{});
  }

  std::size_t dim() const { return n_; }
  const expr::Chart& chart() const { return chart_; }
  std::span<const double> reference_point() const { return ref_; }
  int orientation() const { return sigma_; }

  std::size_t frame_size() const { return n_ - 1; }
  const VectorFieldExpr& frame_field(std::size_t i) const { return frame_.at(i); }
  const VectorFieldExpr& reeb_field() const { return reeb_; }

  // Coefficients of the normalized one-form, one per chart coordinate.
  const std::vector<expr::ExprPtr>& one_form() const { return omega_; }

  // Pre-normalization curvature magnitude (the quantity scaled to 1).
  const expr::ExprPtr& annihilator_norm_squared() const { return normsq_; }

  /* Symbolic commutator of canonical frame fields; i < j < n, where index
     n-1 denotes the Reeb field. */
  const VectorFieldExpr& bracket(std::size_t i, std::size_t j) const;

  // The n x n matrix with columns X_1 .. X_{n-1}, Reeb evaluated at q.
  Mat frame_matrix(std::span<const double> q) const;

  /* Solve frame(q) * v = -[E_i, E_j](q) for every pair; the components of
     v are the structural constants at q. */
  StructuralConstants structural_constants(std::span<const double> q) const;

  /* Degeneracy margin at q: the pre-normalization curvature magnitude
     times |det| of the canonical frame matrix. Zero when the frame is
     dependent or fails to be bracket generating at q; never throws. */
  double contact_margin(std::span<const double> q) const;

  /* Canonical volume applied to n chart vectors at q (ratio of chart
     determinants; the canonical frame has volume 1). */
  double canonical_volume(std::span<const double> q,
                          std::span<const std::vector<double>> vectors) const;

  // det of the canonical frame matrix at q (volume density denominator).
  double frame_det(std::span<const double> q) const;

  /* The curvature 2-form applied to canonical frame fields at q, computed
     through the exterior-derivative identity (no finite differences).
     Indices as in bracket(). */
  double curvature_two_form(std::size_t i, std::size_t j, std::span<const double> q) const;

  /* Jacobi-identity residuals of the constant-coefficient relations
     (n = 3 only). Verifies first that the constants are position
     independent over `samples` points around the reference point and
     throws NumericError("not a Lie-group structure ...") if they vary by
     more than 1e-8. */
  std::array<double, 3> jacobi_residuals(std::uint64_t seed = 0, std::size_t samples = 12,
                                         double box_half_width = 1.0) const;

  /* Compiled evaluator for all canonical frame fields plus all pairwise
     brackets; layout: n fields of n components, then the pairs (i, j),
     i < j, in lexicographic order, n components each. Shared by the flow
     and geodesic integrators. */
  const expr::Program& frame_program() const { return prog_frames_; }
  std::size_t bracket_output_offset(std::size_t i, std::size_t j) const;

private:
  SRStructure() = default;

  expr::Chart chart_;
  std::size_t n_ = 0;
  std::vector<double> ref_;
  int sigma_ = 1;

  std::vector<VectorFieldExpr> frame_;  // X_1 .. X_{n-1}
  VectorFieldExpr reeb_;
  std::vector<expr::ExprPtr> omega_;
  expr::ExprPtr normsq_;

  // brackets_[pair(i,j)] over the canonical frame, i < j
  std::vector<VectorFieldExpr> brackets_;
  // cartan_[pair(i,j)]: curvature 2-form on frame pairs, symbolic
  std::vector<expr::ExprPtr> cartan_;

  expr::Program prog_frames_;

  std::size_t pair_index(std::size_t i, std::size_t j) const;
};

/* Degeneracy margin for a candidate frame without requiring a valid
   structure: returns 0 where construction anchored at q would fail. */
double contact_margin(const expr::Chart& chart, const std::vector<VectorFieldExpr>& frame,
                      std::span<const double> q);

}  // namespace srmin

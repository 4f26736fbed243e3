#include "core/structure.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>

#include "core/sampling.hpp"

namespace srmin {

using expr::ExprPtr;
using expr::Op;

namespace {

ExprPtr square(const ExprPtr& e) { return expr::mul(e, e); }

bool is_zero(const ExprPtr& e) { return e->is_constant(0.0); }

// Symbolic determinant by cofactor expansion along the row or column with
// the most structural zeros. Fine for the small, sparse matrices the
// construction produces; dense high-dimensional frames are not a target.
ExprPtr sym_det(const std::vector<std::vector<ExprPtr>>& m) {
  const std::size_t n = m.size();
  if (n == 0) return expr::constant(1.0);
  if (n == 1) return m[0][0];
  if (n == 2)
    return expr::sub(expr::mul(m[0][0], m[1][1]), expr::mul(m[0][1], m[1][0]));

  std::size_t best = 0;
  bool best_is_row = true;
  std::size_t best_zeros = 0;
  for (std::size_t r = 0; r < n; ++r) {
    std::size_t z = 0;
    for (std::size_t c = 0; c < n; ++c) z += is_zero(m[r][c]);
    if (z >= best_zeros) best_zeros = z, best = r, best_is_row = true;
  }
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t z = 0;
    for (std::size_t r = 0; r < n; ++r) z += is_zero(m[r][c]);
    if (z > best_zeros) best_zeros = z, best = c, best_is_row = false;
  }

  ExprPtr acc = expr::constant(0.0);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t r = best_is_row ? best : k;
    const std::size_t c = best_is_row ? k : best;
    if (is_zero(m[r][c])) continue;
    std::vector<std::vector<ExprPtr>> sub;
    sub.reserve(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
      if (i == r) continue;
      std::vector<ExprPtr> row;
      row.reserve(n - 1);
      for (std::size_t j = 0; j < n; ++j)
        if (j != c) row.push_back(m[i][j]);
      sub.push_back(std::move(row));
    }
    ExprPtr term = expr::mul(m[r][c], sym_det(sub));
    acc = ((r + c) % 2 == 0) ? expr::add(acc, term) : expr::sub(acc, term);
  }
  return acc;
}

ExprPtr apply_covector(const std::vector<ExprPtr>& w, const VectorFieldExpr& v) {
  ExprPtr acc = expr::constant(0.0);
  for (std::size_t k = 0; k < w.size(); ++k)
    acc = expr::add(acc, expr::mul(w[k], v.components[k]));
  return acc;
}

}  // namespace

std::vector<double> VectorFieldExpr::at(std::span<const double> q) const {
  std::vector<double> out(components.size());
  for (std::size_t k = 0; k < components.size(); ++k)
    out[k] = expr::evaluate(components[k], q);
  return out;
}

VectorFieldExpr lie_bracket(const VectorFieldExpr& x, const VectorFieldExpr& y) {
  if (x.dim() != y.dim())
    throw std::invalid_argument("lie_bracket: fields live on different charts");
  const std::size_t n = x.dim();
  VectorFieldExpr out;
  out.components.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    ExprPtr acc = expr::constant(0.0);
    for (std::size_t j = 0; j < n; ++j) {
      acc = expr::add(acc, expr::mul(x.components[j],
                                     expr::differentiate(y.components[k], static_cast<int>(j))));
      acc = expr::sub(acc, expr::mul(y.components[j],
                                     expr::differentiate(x.components[k], static_cast<int>(j))));
    }
    out.components.push_back(std::move(acc));
  }
  return out;
}

expr::ExprPtr directional_derivative(const VectorFieldExpr& v, const expr::ExprPtr& f) {
  ExprPtr acc = expr::constant(0.0);
  for (std::size_t j = 0; j < v.dim(); ++j)
    acc = expr::add(acc, expr::mul(v.components[j], expr::differentiate(f, static_cast<int>(j))));
  return acc;
}

std::size_t SRStructure::pair_index(std::size_t i, std::size_t j) const {
  return i * (2 * n_ - i - 1) / 2 + (j - i - 1);
}

std::shared_ptr<const SRStructure> SRStructure::build(expr::Chart chart,
                                                      std::vector<VectorFieldExpr> frame,
                                                      Options opts) {
  const std::size_t n = static_cast<std::size_t>(chart.dim());
  if (n < 3) throw std::invalid_argument("chart must have at least 3 coordinates");
  if (frame.size() != n - 1)
    throw std::invalid_argument("frame must have exactly dim-1 fields, got " +
                                std::to_string(frame.size()));
  for (const auto& f : frame)
    if (f.dim() != n)
      throw std::invalid_argument("frame field has wrong number of components");
  if (opts.reference_point.empty()) opts.reference_point.assign(n, 0.0);
  if (opts.reference_point.size() != n)
    throw std::invalid_argument("reference point has wrong dimension");
  if (opts.sign_override != 0 && opts.sign_override != 1 && opts.sign_override != -1)
    throw std::invalid_argument("sign override must be -1, 0 or +1");

  auto s = std::shared_ptr<SRStructure>(new SRStructure());
  s->chart_ = std::move(chart);
  s->n_ = n;
  s->ref_ = opts.reference_point;
  s->frame_ = std::move(frame);

  // Raw annihilator: cofactors of the n x (n-1) component matrix. For n=3
  // this is exactly the cross product of the two frame columns.
  std::vector<ExprPtr> omega_tilde(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::vector<std::vector<ExprPtr>> minor;
    minor.reserve(n - 1);
    for (std::size_t row = 0; row < n; ++row) {
      if (row == k) continue;
      std::vector<ExprPtr> r;
      r.reserve(n - 1);
      for (std::size_t col = 0; col + 1 < n; ++col)
        r.push_back(s->frame_[col].components[row]);
      minor.push_back(std::move(r));
    }
    ExprPtr d = sym_det(minor);
    omega_tilde[k] = ((k + n - 1) % 2 == 0) ? d : expr::neg(d);
  }

  double tilde_scale = 0.0;
  for (std::size_t k = 0; k < n; ++k)
    tilde_scale = std::max(tilde_scale, std::abs(expr::evaluate(omega_tilde[k], s->ref_)));
  if (!(tilde_scale > 1e-12))
    throw NumericError("degenerate frame at the reference point");

  // Horizontal brackets feed both the normalization and the sign choice:
  // omega_tilde vanishes on the frame identically, so the exterior
  // derivative on frame pairs reduces to -omega_tilde([X_i, X_j]).
  const std::size_t nh = n - 1;
  std::vector<VectorFieldExpr> hbrackets;
  std::vector<ExprPtr> pairings;
  hbrackets.reserve(nh * (nh - 1) / 2);
  ExprPtr normsq = expr::constant(0.0);
  for (std::size_t i = 0; i < nh; ++i)
    for (std::size_t j = i + 1; j < nh; ++j) {
      hbrackets.push_back(lie_bracket(s->frame_[i], s->frame_[j]));
      pairings.push_back(apply_covector(omega_tilde, hbrackets.back()));
      normsq = expr::add(normsq, square(pairings.back()));
    }
  s->normsq_ = normsq;

  const double nsq_ref = expr::evaluate(normsq, s->ref_);
  if (!(nsq_ref > 1e-24))
    throw NumericError("frame is not bracket generating at the reference point");

  if (opts.sign_override != 0) {
    s->sigma_ = opts.sign_override;
  } else {
    // First pairing that is decisively nonzero at the reference point, in
    // lexicographic (i, j) order, must come out positive in d(omega).
    const double thresh = 1e-9 * std::sqrt(nsq_ref);
    double chosen = 0.0;
    double largest = 0.0;
    for (const ExprPtr& p : pairings) {
      const double v = expr::evaluate(p, s->ref_);
      if (std::abs(v) > std::abs(largest)) largest = v;
      if (std::abs(v) > thresh) {
        chosen = v;
        break;
      }
    }
    if (chosen == 0.0) chosen = largest;
    s->sigma_ = (-chosen >= 0.0) ? 1 : -1;
  }

  ExprPtr norm = expr::unary(Op::Sqrt, normsq);
  s->omega_.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    ExprPtr num = (s->sigma_ > 0) ? omega_tilde[k] : expr::neg(omega_tilde[k]);
    s->omega_[k] = expr::div(num, norm);
  }

  // Coordinate exterior derivative d_ab = d_a(omega_b) - d_b(omega_a).
  std::vector<std::vector<ExprPtr>> d(n, std::vector<ExprPtr>(n));
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      d[a][b] = expr::sub(expr::differentiate(s->omega_[b], static_cast<int>(a)),
                          expr::differentiate(s->omega_[a], static_cast<int>(b)));

  // Reeb field: Cramer on the rows d(omega)(X_i, .) = 0, omega(.) = 1.
  std::vector<std::vector<ExprPtr>> A(n, std::vector<ExprPtr>(n));
  for (std::size_t i = 0; i + 1 < n; ++i)
    for (std::size_t b = 0; b < n; ++b) {
      ExprPtr acc = expr::constant(0.0);
      for (std::size_t a = 0; a < n; ++a)
        acc = expr::add(acc, expr::mul(d[a][b], s->frame_[i].components[a]));
      A[i][b] = acc;
    }
  A[n - 1] = s->omega_;

  ExprPtr detA = sym_det(A);
  const double detA_ref = expr::evaluate(detA, s->ref_);
  if (!(std::abs(detA_ref) > 1e-12))
    throw NumericError("contact condition fails at the reference point");

  s->reeb_.components.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    // RHS is e_n, so det(A with column k replaced) is a single cofactor.
    std::vector<std::vector<ExprPtr>> minor;
    minor.reserve(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      std::vector<ExprPtr> row;
      row.reserve(n - 1);
      for (std::size_t j = 0; j < n; ++j)
        if (j != k) row.push_back(A[i][j]);
      minor.push_back(std::move(row));
    }
    ExprPtr num = sym_det(minor);
    if ((n - 1 + k) % 2 != 0) num = expr::neg(num);
    s->reeb_.components[k] = expr::div(num, detA);
  }

  // Canonical frame pairs: horizontal ones computed above, Reeb pairs here.
  s->brackets_.resize(n * (n - 1) / 2);
  std::size_t h = 0;
  for (std::size_t i = 0; i < nh; ++i)
    for (std::size_t j = i + 1; j < nh; ++j)
      s->brackets_[s->pair_index(i, j)] = std::move(hbrackets[h++]);
  for (std::size_t i = 0; i < nh; ++i)
    s->brackets_[s->pair_index(i, n - 1)] = lie_bracket(s->frame_[i], s->reeb_);

  auto canonical = [&](std::size_t i) -> const VectorFieldExpr& {
    return i + 1 < n ? s->frame_[i] : s->reeb_;
  };

  s->cartan_.resize(s->brackets_.size());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const VectorFieldExpr& u = canonical(i);
      const VectorFieldExpr& v = canonical(j);
      ExprPtr acc = expr::constant(0.0);
      for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a + 1; b < n; ++b) {
          ExprPtr wedge = expr::sub(expr::mul(u.components[a], v.components[b]),
                                    expr::mul(u.components[b], v.components[a]));
          acc = expr::add(acc, expr::mul(d[a][b], wedge));
        }
      s->cartan_[s->pair_index(i, j)] = acc;
    }

  std::vector<ExprPtr> outputs;
  outputs.reserve(n * n + s->brackets_.size() * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) outputs.push_back(canonical(i).components[k]);
  for (const auto& br : s->brackets_)
    for (std::size_t k = 0; k < n; ++k) outputs.push_back(br.components[k]);
  s->prog_frames_ = expr::Program(outputs);

  return s;
}

const VectorFieldExpr& SRStructure::bracket(std::size_t i, std::size_t j) const {
  if (i >= j || j >= n_) throw std::invalid_argument("bracket: need i < j < dim");
  return brackets_[pair_index(i, j)];
}

std::size_t SRStructure::bracket_output_offset(std::size_t i, std::size_t j) const {
  if (i >= j || j >= n_) throw std::invalid_argument("bracket offset: need i < j < dim");
  return n_ * n_ + pair_index(i, j) * n_;
}

Mat SRStructure::frame_matrix(std::span<const double> q) const {
  if (q.size() != n_) throw std::invalid_argument("point has wrong dimension");
  Mat m(n_, n_);
  for (std::size_t i = 0; i < n_; ++i) {
    const VectorFieldExpr& f = (i + 1 < n_) ? frame_[i] : reeb_;
    for (std::size_t k = 0; k < n_; ++k) m(k, i) = expr::evaluate(f.components[k], q);
  }
  return m;
}

StructuralConstants SRStructure::structural_constants(std::span<const double> q) const {
  if (q.size() != n_) throw std::invalid_argument("point has wrong dimension");
  std::vector<double> vals(prog_frames_.output_count());
  std::vector<double> scratch(prog_frames_.scratch_size());
  prog_frames_.evaluate(q, vals, scratch);

  Mat m(n_, n_);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t k = 0; k < n_; ++k) m(k, i) = vals[i * n_ + k];
  std::vector<int> perm;
  if (!lu_factor(m, perm))
    throw NumericError("canonical frame is singular at the queried point");

  StructuralConstants out;
  out.n = n_;
  out.c.assign(n_ * n_ * n_, 0.0);
  std::vector<double> rhs(n_);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = i + 1; j < n_; ++j) {
      const std::size_t off = n_ * n_ + pair_index(i, j) * n_;
      for (std::size_t k = 0; k < n_; ++k) rhs[k] = -vals[off + k];
      lu_solve(m, perm, rhs);
      for (std::size_t k = 0; k < n_; ++k) {
        out.c[(i * n_ + j) * n_ + k] = rhs[k];
        out.c[(j * n_ + i) * n_ + k] = -rhs[k];
      }
    }
  return out;
}

double SRStructure::frame_det(std::span<const double> q) const {
  Mat m = frame_matrix(q);
  return det(std::move(m));
}

double SRStructure::contact_margin(std::span<const double> q) const {
  try {
    const double nsq = expr::evaluate(normsq_, q);
    if (!(nsq > 0.0) || !std::isfinite(nsq)) return 0.0;
    const double fd = frame_det(q);
    if (!std::isfinite(fd)) return 0.0;
    return std::sqrt(nsq) * std::abs(fd);
  } catch (const expr::EvalError&) {
    return 0.0;
  }
}

double SRStructure::canonical_volume(std::span<const double> q,
                                     std::span<const std::vector<double>> vectors) const {
  if (vectors.size() != n_) throw std::invalid_argument("canonical_volume: need dim vectors");
  for (const auto& v : vectors)
    if (v.size() != n_) throw std::invalid_argument("canonical_volume: vector dimension");
  const double denom = frame_det(q);
  if (!(std::abs(denom) > 1e-14))
    throw NumericError("canonical frame is singular at the queried point");
  Mat m(n_, n_);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t k = 0; k < n_; ++k) m(k, i) = vectors[i][k];
  return det(std::move(m)) / denom;
}

double SRStructure::curvature_two_form(std::size_t i, std::size_t j,
                                       std::span<const double> q) const {
  if (i >= n_ || j >= n_) throw std::invalid_argument("curvature_two_form: index");
  if (i == j) return 0.0;
  const bool flip = i > j;
  if (flip) std::swap(i, j);
  const double v = expr::evaluate(cartan_[pair_index(i, j)], q);
  return flip ? -v : v;
}

std::array<double, 3> SRStructure::jacobi_residuals(std::uint64_t seed, std::size_t samples,
                                                    double box_half_width) const {
  if (n_ != 3)
    throw std::invalid_argument("jacobi_residuals: defined for 3-dimensional charts");
  samples = std::max<std::size_t>(samples, 10);

  const StructuralConstants base = structural_constants(ref_);
  SampleRng rng(seed);
  double dev = 0.0;
  for (std::size_t s = 1; s < samples; ++s) {
    const std::vector<double> q = rng.point_near(ref_, box_half_width);
    const StructuralConstants cs = structural_constants(q);
    for (std::size_t t = 0; t < cs.c.size(); ++t)
      dev = std::max(dev, std::abs(cs.c[t] - base.c[t]));
  }
  if (dev > 1e-8)
    throw NumericError("not a Lie-group structure: frame coefficients vary across sample "
                       "points by " +
                       expr::format_double(dev));

  const auto c = [&](std::size_t i, std::size_t j, std::size_t k) { return base.at(i, j, k); };
  return {c(0, 2, 0) + c(1, 2, 1),
          c(0, 1, 0) * c(0, 2, 0) + c(0, 1, 1) * c(1, 2, 0),
          c(0, 1, 0) * c(0, 2, 1) + c(0, 1, 1) * c(1, 2, 1)};
}

double contact_margin(const expr::Chart& chart, const std::vector<VectorFieldExpr>& frame,
                      std::span<const double> q) {
  try {
    SRStructure::Options opts;
    opts.reference_point.assign(q.begin(), q.end());
    auto s = SRStructure::build(chart, frame, opts);
    return s->contact_margin(q);
  } catch (const NumericError&) {
    return 0.0;
  } catch (const expr::EvalError&) {
    return 0.0;
  }
}

}  // namespace srmin

#pragma once

#include <span>
#include <vector>

#include "core/linalg.hpp"
#include "core/structure.hpp"

namespace srmin {

/* Scratch-reusing evaluator over a structure's compiled frame program:
   canonical field values, pair brackets, and on-demand structural-constant
   solves, all at one point at a time. Non-owning; one instance per
   integration loop, not shareable across threads. */
class FrameProbe {
 public:
  explicit FrameProbe(const SRStructure& s)
      : s_(&s),
        n_(s.dim()),
        vals_(s.frame_program().output_count()),
        scratch_(s.frame_program().scratch_size()),
        lu_(n_, n_) {}

  const SRStructure& structure() const { return *s_; }

  void move_to(std::span<const double> q) {
    s_->frame_program().evaluate(q, vals_, scratch_);
    factored_ = false;
  }

  // Chart components of canonical field i (index n-1 is the Reeb field).
  std::span<const double> field(std::size_t i) const {
    return {vals_.data() + i * n_, n_};
  }

  std::span<const double> bracket(std::size_t i, std::size_t j) const {
    return {vals_.data() + s_->bracket_output_offset(i, j), n_};
  }

  /* c_ij^k for one pair at the current point: frame(q) * out = -[X_i, X_j](q). */
  void pair_constants(std::size_t i, std::size_t j, std::span<double> out) {
    ensure_factored();
    const std::span<const double> br = bracket(i, j);
    for (std::size_t k = 0; k < n_; ++k) out[k] = -br[k];
    lu_solve(lu_, perm_, out);
  }

  /* Components of a chart vector in the canonical frame at the current
     point: frame(q) * out = v. The last component is the transverse part. */
  void decompose(std::span<const double> v, std::span<double> out) {
    ensure_factored();
    for (std::size_t k = 0; k < n_; ++k) out[k] = v[k];
    lu_solve(lu_, perm_, out);
  }

 private:
  void ensure_factored() {
    if (factored_) return;
    for (std::size_t c = 0; c < n_; ++c)
      for (std::size_t r = 0; r < n_; ++r) lu_(r, c) = vals_[c * n_ + r];
    if (!lu_factor(lu_, perm_))
      throw NumericError("canonical frame is singular at the queried point");
    factored_ = true;
  }

  const SRStructure* s_;
  std::size_t n_;
  std::vector<double> vals_, scratch_;
  Mat lu_;
  std::vector<int> perm_;
  bool factored_ = false;
};

}  // namespace srmin

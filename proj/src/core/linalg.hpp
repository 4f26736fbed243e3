#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace srmin {

/* Dense row-major matrix for the small systems that show up here
   (frame matrices up to 9x9, 2x2 classification blocks). */
class Mat {
public:
  Mat() = default;
  Mat(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), a_(rows * cols, 0.0) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

  std::span<double> data() { return a_; }
  std::span<const double> data() const { return a_; }

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> a_;
};

/* In-place LU with partial pivoting. Returns false if the matrix is
   numerically singular (pivot below rel_tol times the largest entry).
   `sign` receives the permutation parity for determinant recovery. */
bool lu_factor(Mat& a, std::vector<int>& perm, int* sign = nullptr,
               double rel_tol = 1e-13);

// Solve LU x = b in place using a factorization from lu_factor.
void lu_solve(const Mat& lu, const std::vector<int>& perm, std::span<double> b);

double lu_det(const Mat& lu, int sign);

// One-shot helpers; these copy the matrix.
bool solve(Mat a, std::span<double> b);
double det(Mat a);

}  // namespace srmin

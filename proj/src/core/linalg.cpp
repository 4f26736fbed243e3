#include "core/linalg.hpp"

#include <cmath>
#include <stdexcept>

namespace srmin {

bool lu_factor(Mat& a, std::vector<int>& perm, int* sign, double rel_tol) {
  if (a.rows() != a.cols()) throw std::invalid_argument("lu_factor: square matrix required");
  const std::size_t n = a.rows();
  perm.resize(n);
  int parity = 1;

  double scale = 0.0;
  for (double v : a.data()) scale = std::max(scale, std::abs(v));
  const double tol = rel_tol * (scale > 0.0 ? scale : 1.0);

  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    double best = std::abs(a(k, k));
    for (std::size_t i = k + 1; i < n; ++i) {
      double v = std::abs(a(i, k));
      if (v > best) {
        best = v;
        piv = i;
      }
    }
    perm[k] = static_cast<int>(piv);
    if (piv != k) {
      parity = -parity;
      for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
    }
    if (best <= tol) {
      if (sign) *sign = parity;
      return false;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      a(i, k) /= a(k, k);
      double f = a(i, k);
      for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= f * a(k, j);
    }
  }
  if (sign) *sign = parity;
  return true;
}

void lu_solve(const Mat& lu, const std::vector<int>& perm, std::span<double> b) {
  const std::size_t n = lu.rows();
  if (b.size() != n) throw std::invalid_argument("lu_solve: size mismatch");
  // Interchanges must all land before the substitution: the stored L has
  // its rows in final (fully pivoted) order.
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = static_cast<std::size_t>(perm[k]);
    if (p != k) std::swap(b[k], b[p]);
  }
  for (std::size_t i = 1; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j) b[i] -= lu(i, j) * b[j];
  for (std::size_t k = n; k-- > 0;) {
    for (std::size_t j = k + 1; j < n; ++j) b[k] -= lu(k, j) * b[j];
    b[k] /= lu(k, k);
  }
}

double lu_det(const Mat& lu, int sign) {
  double d = static_cast<double>(sign);
  for (std::size_t k = 0; k < lu.rows(); ++k) d *= lu(k, k);
  return d;
}

bool solve(Mat a, std::span<double> b) {
  std::vector<int> perm;
  if (!lu_factor(a, perm)) return false;
  lu_solve(a, perm, b);
  return true;
}

double det(Mat a) {
  const std::size_t n = a.rows();
  if (n != a.cols()) throw std::invalid_argument("det: square matrix required");
  if (n == 0) return 1.0;
  if (n == 1) return a(0, 0);
  if (n == 2) return a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
  if (n == 3)
    return a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) -
           a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0)) +
           a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0));
  std::vector<int> perm;
  int sign = 1;
  if (!lu_factor(a, perm, &sign)) return 0.0;  // singular to working precision
  return lu_det(a, sign);
}

}  // namespace srmin

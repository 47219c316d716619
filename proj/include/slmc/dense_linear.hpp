#ifndef SLMC_DENSE_LINEAR_HPP_
#define SLMC_DENSE_LINEAR_HPP_

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "slmc/probability.hpp"

namespace slmc {

// Dense Gaussian elimination, used by the exact-rational validation path
// and as an independent oracle for the iterative solvers. Rational pivots
// take the first nonzero; doubles use partial pivoting.
template <class T>
std::vector<T> solve_dense(std::vector<std::vector<T>> a, std::vector<T> b) {
  const std::size_t n = a.size();
  if (b.size() != n) throw std::invalid_argument("dimension mismatch");
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    if constexpr (is_rational_v<T>) {
      while (pivot < n && a[pivot][col] == T(0)) ++pivot;
      if (pivot == n) throw std::runtime_error("singular matrix");
    } else {
      for (std::size_t r = col + 1; r < n; ++r) {
        if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
      }
      if (a[pivot][col] == T(0)) throw std::runtime_error("singular matrix");
    }
    std::swap(a[col], a[pivot]);
    std::swap(b[col], b[pivot]);
    for (std::size_t r = col + 1; r < n; ++r) {
      if (a[r][col] == T(0)) continue;
      T f = a[r][col] / a[col][col];
      a[r][col] = T(0);
      for (std::size_t c = col + 1; c < n; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  std::vector<T> x(n, T(0));
  for (std::size_t i = n; i-- > 0;) {
    T acc = b[i];
    for (std::size_t c = i + 1; c < n; ++c) acc -= a[i][c] * x[c];
    x[i] = acc / a[i][i];
  }
  return x;
}

}  // namespace slmc

#endif  // SLMC_DENSE_LINEAR_HPP_

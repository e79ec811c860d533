#pragma once

#include <cmath>
#include <vector>

#include "sweep/eigen_support.hpp"
#include "sweep/errors.hpp"
#include "sweep/ops.hpp"

namespace sweep {

// A pivot is declared singular when it falls below this fraction of its row's
// largest magnitude.
inline constexpr double kSingularPivotRel = 1e-12;

/// Dense LU with row partial pivoting, templated on the scalar so a solve can
/// itself be recorded on a tape. Pivot selection compares primal magnitudes
/// only; the choice is control flow, frozen per factorization.
template <typename T>
class LuFactorization {
 public:
  explicit LuFactorization(MatrixX<T> a) : lu_(std::move(a)) {
    const Eigen::Index n = lu_.rows();
    if (n != lu_.cols()) throw DimensionError("lu: matrix must be square");
    perm_.resize(static_cast<std::size_t>(n));
    std::vector<double> row_max(static_cast<std::size_t>(n), 0.0);
    for (Eigen::Index i = 0; i < n; ++i) {
      perm_[static_cast<std::size_t>(i)] = i;
      double m = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) m = std::max(m, std::abs(primal(lu_(i, j))));
      if (m == 0.0) throw SingularJacobianError("lu: zero row");
      row_max[static_cast<std::size_t>(i)] = m;
    }
    for (Eigen::Index k = 0; k < n; ++k) {
      Eigen::Index best = k;
      double best_mag = -1.0;
      for (Eigen::Index i = k; i < n; ++i) {
        double mag = std::abs(primal(lu_(i, k))) / row_max[static_cast<std::size_t>(i)];
        if (mag > best_mag) {
          best_mag = mag;
          best = i;
        }
      }
      double pivot_mag = std::abs(primal(lu_(best, k)));
      if (pivot_mag < kSingularPivotRel * row_max[static_cast<std::size_t>(best)])
        throw SingularJacobianError();
      if (best != k) {
        lu_.row(k).swap(lu_.row(best));
        std::swap(row_max[static_cast<std::size_t>(k)], row_max[static_cast<std::size_t>(best)]);
        std::swap(perm_[static_cast<std::size_t>(k)], perm_[static_cast<std::size_t>(best)]);
      }
      for (Eigen::Index i = k + 1; i < n; ++i) {
        T f = lu_(i, k) / lu_(k, k);
        lu_(i, k) = f;
        for (Eigen::Index j = k + 1; j < n; ++j) lu_(i, j) -= f * lu_(k, j);
      }
    }
  }

  Eigen::Index dim() const { return lu_.rows(); }

  VectorX<T> solve(const VectorX<T>& b) const {
    if (b.size() != dim()) throw DimensionError("lu: rhs size mismatch");
    const Eigen::Index n = dim();
    VectorX<T> x(n);
    for (Eigen::Index i = 0; i < n; ++i) x[i] = b[perm_[static_cast<std::size_t>(i)]];
    for (Eigen::Index i = 1; i < n; ++i)
      for (Eigen::Index j = 0; j < i; ++j) x[i] -= lu_(i, j) * x[j];
    for (Eigen::Index i = n - 1; i >= 0; --i) {
      for (Eigen::Index j = i + 1; j < n; ++j) x[i] -= lu_(i, j) * x[j];
      x[i] = x[i] / lu_(i, i);
    }
    return x;
  }

  MatrixX<T> solve(const MatrixX<T>& b) const {
    if (b.rows() != dim()) throw DimensionError("lu: rhs row count mismatch");
    MatrixX<T> x(b.rows(), b.cols());
    for (Eigen::Index c = 0; c < b.cols(); ++c) x.col(c) = solve(VectorX<T>(b.col(c)));
    return x;
  }

 private:
  MatrixX<T> lu_;
  std::vector<Eigen::Index> perm_;
};

template <typename T>
VectorX<T> lu_solve(const MatrixX<T>& a, const VectorX<T>& b) {
  return LuFactorization<T>(a).solve(b);
}

template <typename T>
MatrixX<T> lu_solve(const MatrixX<T>& a, const MatrixX<T>& b) {
  return LuFactorization<T>(a).solve(b);
}

}  // namespace sweep

#pragma once

#include <Eigen/Core>

#include "sweep/errors.hpp"
#include "sweep/ops.hpp"

namespace sweep {

template <typename T>
using Matrix2 = Eigen::Matrix<T, 2, 2>;

namespace detail {

// Closed form needs a real, nonzero discriminant (a-d)^2 + 4bc.
inline void check_matexp2_domain(double a, double b, double c, double d) {
  double disc = (a - d) * (a - d) + 4.0 * b * c;
  if (disc < 0.0) throw DomainError("matexp2: (a-d)^2 + 4bc is negative");
  if (disc == 0.0) throw DomainError("matexp2: (a-d)^2 + 4bc is zero");
}

}  // namespace detail

/// exp(A) for a 2x2 A = [[a, b], [c, d]] in closed form, written exactly as
/// the formula reads: every shared subexpression is recomputed where it
/// appears. The node-count baseline for the hand-optimized variant below.
template <typename T>
Matrix2<T> matexp2_standard(const Matrix2<T>& m) {
  const T& a = m(0, 0);
  const T& b = m(0, 1);
  const T& c = m(1, 0);
  const T& d = m(1, 1);
  detail::check_matexp2_domain(primal(a), primal(b), primal(c), primal(d));

  T delta = sqrt(square(a - d) + b * c * 4.0);
  Matrix2<T> e;
  e(0, 0) = exp((a + d) * 0.5) * (delta * cosh(delta * 0.5) + (a - d) * sinh(delta * 0.5));
  e(0, 1) = b * exp((a + d) * 0.5) * sinh(delta * 0.5) * 2.0;
  e(1, 0) = c * exp((a + d) * 0.5) * sinh(delta * 0.5) * 2.0;
  e(1, 1) = exp((a + d) * 0.5) * (delta * cosh(delta * 0.5) + (d - a) * sinh(delta * 0.5));
  e(0, 0) = e(0, 0) / delta;
  e(0, 1) = e(0, 1) / delta;
  e(1, 0) = e(1, 0) / delta;
  e(1, 1) = e(1, 1) / delta;
  return e;
}

/// Same closed form with every shared subexpression computed once. Produces
/// strictly fewer nodes than matexp2_standard on any input while agreeing to
/// rounding.
template <typename T>
Matrix2<T> matexp2_optimized(const Matrix2<T>& m) {
  const T& a = m(0, 0);
  const T& b = m(0, 1);
  const T& c = m(1, 0);
  const T& d = m(1, 1);
  detail::check_matexp2_domain(primal(a), primal(b), primal(c), primal(d));

  T a_minus_d = a - d;
  T delta = sqrt(square(a_minus_d) + b * c * 4.0);
  T half_delta = delta * 0.5;
  T cosh_half_delta = cosh(half_delta);
  T sinh_half_delta = sinh(half_delta);
  T exp_half_a_plus_d = exp((a + d) * 0.5);
  T two_exp_sinh = exp_half_a_plus_d * sinh_half_delta * 2.0;
  T delta_cosh = delta * cosh_half_delta;
  T ad_sinh_half_delta = a_minus_d * sinh_half_delta;

  Matrix2<T> e;
  e(0, 0) = exp_half_a_plus_d * (delta_cosh + ad_sinh_half_delta) / delta;
  e(0, 1) = b * two_exp_sinh / delta;
  e(1, 0) = c * two_exp_sinh / delta;
  e(1, 1) = exp_half_a_plus_d * (delta_cosh - ad_sinh_half_delta) / delta;
  return e;
}

}  // namespace sweep

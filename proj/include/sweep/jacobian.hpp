#pragma once

#include <utility>

#include "sweep/dual.hpp"
#include "sweep/eigen_support.hpp"
#include "sweep/errors.hpp"
#include "sweep/tape.hpp"

namespace sweep {

/// One forward sweep: f(x) together with J(x) * u. `f` must be a generic
/// callable mapping VectorX<T> -> VectorX<T> built from the engine's
/// primitives.
template <typename F>
std::pair<VectorXd, VectorXd> directional_derivative(F&& f, const VectorXd& x,
                                                     const VectorXd& u) {
  if (x.size() != u.size())
    throw DimensionError("directional_derivative: x/u size mismatch");
  VectorX<Dual> xd(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) xd[i] = Dual(x[i], u[i]);
  VectorX<Dual> yd = f(xd);
  VectorXd value(yd.size()), tangent(yd.size());
  for (Eigen::Index i = 0; i < yd.size(); ++i) {
    value[i] = yd[i].value;
    tangent[i] = yd[i].tangent;
  }
  return {value, tangent};
}

/// Jacobian column by column: n forward sweeps with basis tangents.
template <typename F>
MatrixXd jacobian_forward(F&& f, const VectorXd& x, Eigen::Index m) {
  const Eigen::Index n = x.size();
  if (n == 0) throw InvalidArgumentError("jacobian_forward: empty input");
  MatrixXd jac(m, n);
  VectorXd u = VectorXd::Zero(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    u[j] = 1.0;
    auto [value, col] = directional_derivative(f, x, u);
    u[j] = 0.0;
    if (col.size() != m) throw DimensionError("jacobian_forward: output dim != m");
    jac.col(j) = col;
  }
  return jac;
}

/// Jacobian row by row: record f once on `tape`, then one reverse sweep per
/// output with basis cotangents. Adjoints are zeroed between sweeps; the
/// recording is never repeated.
template <typename F>
MatrixXd jacobian_reverse(F&& f, const VectorXd& x, Tape& tape) {
  const Eigen::Index n = x.size();
  if (n == 0) throw InvalidArgumentError("jacobian_reverse: empty input");
  tape.clear();
  VectorX<Var> xv(n);
  for (Eigen::Index i = 0; i < n; ++i) xv[i] = tape.new_input(x[i]);
  VectorX<Var> yv = f(xv);
  const Eigen::Index m = yv.size();
  MatrixXd jac(m, n);
  VectorXd w = VectorXd::Zero(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    w[i] = 1.0;
    accumulate_adjoints<double>(tape, {yv.data(), static_cast<std::size_t>(m)},
                                {w.data(), static_cast<std::size_t>(m)});
    w[i] = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) jac(i, j) = xv[j].adjoint();
  }
  return jac;
}

template <typename F>
MatrixXd jacobian_reverse(F&& f, const VectorXd& x) {
  Tape tape;
  return jacobian_reverse(std::forward<F>(f), x, tape);
}

/// Mode pick by shape: tall Jacobians (n > m) run reverse, everything else
/// forward. A forward pick leaves `tape` untouched.
template <typename F>
MatrixXd jacobian_auto(F&& f, const VectorXd& x, Eigen::Index m, Tape& tape) {
  if (x.size() > m) return jacobian_reverse(std::forward<F>(f), x, tape);
  return jacobian_forward(std::forward<F>(f), x, m);
}

template <typename F>
MatrixXd jacobian_auto(F&& f, const VectorXd& x, Eigen::Index m) {
  Tape tape;
  return jacobian_auto(std::forward<F>(f), x, m, tape);
}

}  // namespace sweep

#pragma once

#include "sweep/dual.hpp"
#include "sweep/eigen_support.hpp"
#include "sweep/errors.hpp"
#include "sweep/tape.hpp"

namespace sweep {

/// Seed for a second-order reverse sweep. The sweep returns, per input i,
///   u * df/dx_i + w * (H(x) v)_i
/// so u = 0, w = 1 extracts a pure Hessian-vector product.
struct HvpSeed {
  double u = 0.0;
  double w = 1.0;
  VectorXd v;
};

/// Forward-over-reverse: record f once on a dual-valued tape whose input
/// tangents carry seed.v, then run one reverse sweep seeded with (w, u). The
/// adjoint values hold w * grad f; their tangents hold the combination above.
/// Cost is a constant factor over evaluating f.
template <typename F>
VectorXd second_order_combination(F&& f, const VectorXd& x, const HvpSeed& seed) {
  const Eigen::Index n = x.size();
  if (seed.v.size() != n) throw DimensionError("seed direction size mismatch");
  if (n == 0) throw InvalidArgumentError("empty input");

  BasicTape<Dual> tape;
  VectorX<BasicVar<Dual>> xs(n);
  for (Eigen::Index i = 0; i < n; ++i) xs[i] = tape.new_input(Dual(x[i], seed.v[i]));
  BasicVar<Dual> y = f(xs);

  VectorXd out = VectorXd::Zero(n);
  if (!y.attached()) return out;  // f collapsed to a constant
  Dual s(seed.w, seed.u);
  accumulate_adjoints<Dual>(tape, {&y, 1}, {&s, 1});
  for (Eigen::Index i = 0; i < n; ++i) out[i] = xs[i].adjoint().tangent;
  return out;
}

/// Hessian-vector product H(x) v without forming H.
template <typename F>
VectorXd hvp(F&& f, const VectorXd& x, const VectorXd& v) {
  return second_order_combination(f, x, HvpSeed{0.0, 1.0, v});
}

/// Dense Hessian, column i = hvp(f, x, e_i). The function is recorded once;
/// later columns reseed the input tangents and replay the stored graph, so
/// each column sees bit-identical arithmetic to a fresh hvp call.
template <typename F>
MatrixXd hessian(F&& f, const VectorXd& x) {
  const Eigen::Index n = x.size();
  if (n == 0) throw InvalidArgumentError("empty input");

  BasicTape<Dual> tape;
  VectorX<BasicVar<Dual>> xs(n);
  for (Eigen::Index i = 0; i < n; ++i)
    xs[i] = tape.new_input(Dual(x[i], i == 0 ? 1.0 : 0.0));
  BasicVar<Dual> y = f(xs);

  MatrixXd h = MatrixXd::Zero(n, n);
  if (!y.attached()) return h;
  Dual s(1.0, 0.0);
  for (Eigen::Index col = 0; col < n; ++col) {
    if (col > 0) {
      for (Eigen::Index i = 0; i < n; ++i)
        tape.node(xs[i].id()).value.tangent = (i == col) ? 1.0 : 0.0;
      tape.replay();
    }
    accumulate_adjoints<Dual>(tape, {&y, 1}, {&s, 1});
    for (Eigen::Index i = 0; i < n; ++i) h(i, col) = xs[i].adjoint().tangent;
  }
  return h;
}

}  // namespace sweep

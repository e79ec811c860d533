#pragma once

#include <cmath>
#include <functional>
#include <type_traits>
#include <utility>

#include "sweep/dual.hpp"
#include "sweep/eigen_support.hpp"
#include "sweep/errors.hpp"
#include "sweep/jacobian.hpp"
#include "sweep/lu.hpp"
#include "sweep/tape.hpp"

namespace sweep {

/// A square algebraic system f(y, theta) = 0 with optional analytic state
/// Jacobian df/dy. The residual is type-erased at every scalar the engine
/// drives, so one definition serves plain evaluation, taped recording and
/// dual sweeps.
struct AlgebraicProblem {
  Eigen::Index n_states = 0;  // dim(y) == dim(f)
  Eigen::Index n_params = 0;  // dim(theta)

  std::function<VectorXd(const VectorXd&, const VectorXd&)> residual_d;
  std::function<VectorX<Var>(const VectorX<Var>&, const VectorX<Var>&)> residual_v;
  std::function<VectorX<Dual>(const VectorX<Dual>&, const VectorX<Dual>&)> residual_fd;

  std::function<MatrixXd(const VectorXd&, const VectorXd&)> jac_y_d;
  std::function<MatrixX<Var>(const VectorX<Var>&, const VectorX<Var>&)> jac_y_v;

  bool has_analytic_jac() const { return static_cast<bool>(jac_y_d); }

  template <typename T>
  VectorX<T> residual(const VectorX<T>& y, const VectorX<T>& theta) const {
    if constexpr (std::is_same_v<T, double>) return residual_d(y, theta);
    else if constexpr (std::is_same_v<T, Dual>) return residual_fd(y, theta);
    else return residual_v(y, theta);
  }
};

template <typename F>
AlgebraicProblem make_algebraic_problem(Eigen::Index n_states, Eigen::Index n_params, F residual) {
  AlgebraicProblem p;
  p.n_states = n_states;
  p.n_params = n_params;
  p.residual_d = residual;
  p.residual_v = residual;
  p.residual_fd = std::move(residual);
  return p;
}

template <typename F, typename G>
AlgebraicProblem make_algebraic_problem(Eigen::Index n_states, Eigen::Index n_params, F residual,
                                        G jac_y) {
  AlgebraicProblem p = make_algebraic_problem(n_states, n_params, std::move(residual));
  p.jac_y_d = jac_y;
  p.jac_y_v = std::move(jac_y);
  return p;
}

struct SolverConfig {
  VectorXd y0;            // initial guess, dim n_states
  double tol = 1e-10;     // residual max-norm target
  int max_iter = 100;
};

struct NewtonResult {
  VectorXd y;
  int iterations;  // number of Newton updates applied
};

/// Sensitivity solve outcome: the root, the full parameter Jacobian
/// d y* / d theta (n_states x n_params), and bookkeeping for cost studies.
struct SensitivityResult {
  VectorXd y;
  MatrixXd jacobian;
  int iterations;
  std::size_t tape_high_water;  // peak tape nodes used on the differentiation path
};

namespace detail {

inline void validate_solver_args(const AlgebraicProblem& p, const VectorXd& theta,
                                 const SolverConfig& config) {
  if (theta.size() != p.n_params) throw DimensionError("theta size mismatch");
  if (config.y0.size() != p.n_states) throw DimensionError("y0 size mismatch");
  if (!(config.tol > 0.0)) throw InvalidArgumentError("tol must be positive");
  if (config.max_iter < 1) throw InvalidArgumentError("max_iter must be >= 1");
}

// df/dy at fixed theta, analytic when available, otherwise by AD on a wrapper
// that hides theta behind constants.
inline MatrixXd state_jacobian(const AlgebraicProblem& p, const VectorXd& y,
                               const VectorXd& theta) {
  if (p.has_analytic_jac()) return p.jac_y_d(y, theta);
  auto fy = [&](const auto& yv) {
    using S = typename std::decay_t<decltype(yv)>::Scalar;
    VectorX<S> th = theta.template cast<S>();
    return p.residual<S>(yv, th);
  };
  return jacobian_auto(fy, y, p.n_states);
}

}  // namespace detail

/// Full-step Newton iteration on plain doubles: y <- y - (df/dy)^-1 f until
/// the residual max-norm meets tol. No tape is involved.
inline NewtonResult newton_solve(const AlgebraicProblem& problem, const VectorXd& theta,
                                 const SolverConfig& config) {
  detail::validate_solver_args(problem, theta, config);
  VectorXd y = config.y0;
  double norm = 0.0;
  for (int iter = 0; iter <= config.max_iter; ++iter) {
    VectorXd r = problem.residual_d(y, theta);
    if (r.size() != problem.n_states) throw DimensionError("residual size mismatch");
    if (!r.allFinite()) throw DomainError("residual is not finite");
    norm = r.size() ? r.cwiseAbs().maxCoeff() : 0.0;
    if (norm <= config.tol) return {y, iter};
    if (iter == config.max_iter) break;
    MatrixXd jy = detail::state_jacobian(problem, y, theta);
    if (!jy.allFinite()) throw DomainError("state Jacobian is not finite");
    y -= lu_solve<double>(jy, r);
  }
  throw NonConvergenceError(config.max_iter, norm);
}

/// Differentiate the solver by recording it: theta are tape inputs, every
/// Newton iteration (residual, analytic df/dy, the linear solve, the update)
/// lands on one tape, and the parameter Jacobian falls out of n_states
/// reverse sweeps over the frozen iteration trace. Tape size grows with the
/// iteration count; that is the point of measuring it.
inline SensitivityResult solve_and_diff_naive(const AlgebraicProblem& problem,
                                              const VectorXd& theta, const SolverConfig& config) {
  detail::validate_solver_args(problem, theta, config);
  if (!problem.has_analytic_jac())
    throw InvalidArgumentError("naive differentiation needs an analytic state Jacobian");

  Tape tape;
  const Eigen::Index n = problem.n_states;
  const Eigen::Index k = problem.n_params;
  VectorX<Var> th(k);
  for (Eigen::Index j = 0; j < k; ++j) th[j] = tape.new_input(theta[j]);
  VectorX<Var> y = config.y0.cast<Var>();  // initial guess enters as constants

  int iterations = 0;
  bool converged = false;
  double norm = 0.0;
  for (int iter = 0; iter <= config.max_iter; ++iter) {
    VectorX<Var> r = problem.residual_v(y, th);
    if (r.size() != n) throw DimensionError("residual size mismatch");
    norm = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) norm = std::max(norm, std::abs(r[i].value()));
    if (norm <= config.tol) {
      iterations = iter;
      converged = true;
      break;
    }
    if (iter == config.max_iter) break;
    MatrixX<Var> jy = problem.jac_y_v(y, th);
    VectorX<Var> dy = lu_solve<Var>(jy, r);
    for (Eigen::Index i = 0; i < n; ++i) y[i] = y[i] - dy[i];
  }
  if (!converged) throw NonConvergenceError(config.max_iter, norm);

  SensitivityResult result;
  result.y = VectorXd(n);
  for (Eigen::Index i = 0; i < n; ++i) result.y[i] = y[i].value();
  result.iterations = iterations;
  result.jacobian = MatrixXd::Zero(n, k);
  VectorXd w = VectorXd::Zero(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    w[i] = 1.0;
    accumulate_adjoints<double>(tape, {y.data(), static_cast<std::size_t>(n)},
                                {w.data(), static_cast<std::size_t>(n)});
    w[i] = 0.0;
    for (Eigen::Index j = 0; j < k; ++j) result.jacobian(i, j) = th[j].adjoint();
  }
  result.tape_high_water = tape.high_water_mark();
  return result;
}

/// Differentiate through the root instead of the iteration: solve on plain
/// doubles, then apply the implicit relation (df/dy) J = -(df/dtheta) at the
/// root. df/dtheta comes from one AD pass over the residual at y*; df/dy is
/// the analytic Jacobian when the problem carries one and an AD pass
/// otherwise. The tape footprint does not depend on how many Newton steps the
/// solve took.
inline SensitivityResult solve_and_diff_ift(const AlgebraicProblem& problem,
                                            const VectorXd& theta, const SolverConfig& config) {
  NewtonResult root = newton_solve(problem, theta, config);
  const VectorXd& y = root.y;

  MatrixXd jy = detail::state_jacobian(problem, y, theta);

  Tape tape;
  auto ftheta = [&](const auto& thv) {
    using S = typename std::decay_t<decltype(thv)>::Scalar;
    VectorX<S> yc = y.template cast<S>();
    return problem.residual<S>(yc, thv);
  };
  MatrixXd jtheta = jacobian_auto(ftheta, theta, problem.n_states, tape);

  SensitivityResult result;
  result.y = y;
  result.iterations = root.iterations;
  result.jacobian = lu_solve<double>(jy, MatrixXd(-jtheta));
  result.tape_high_water = tape.high_water_mark();
  return result;
}

}  // namespace sweep

#pragma once

#include <cmath>

#include "sweep/eigen_support.hpp"
#include "sweep/errors.hpp"
#include "sweep/ops.hpp"
#include "sweep/rng.hpp"
#include "sweep/solver.hpp"

namespace sweep {

/// Two-compartment first-order kinetics:
///   y1' = -k1 y1,   y2' = k1 y1 - k2 y2
/// advanced by the exact evolution operator over a time span dt. Linear in
/// the state, smooth in the rates; k1 == k2 is a removable singularity of the
/// formula and is rejected.
template <typename T>
Eigen::Matrix<T, 2, 1> evolve(const Eigen::Matrix<T, 2, 1>& y0, const T& k1, const T& k2,
                              double dt) {
  if (!(primal(k1) > 0.0) || !(primal(k2) > 0.0))
    throw DomainError("evolve: rates must be positive");
  if (primal(k1) == primal(k2)) throw DomainError("evolve: rates must differ");
  if (dt < 0.0) throw InvalidArgumentError("evolve: dt must be nonnegative");

  T e1 = exp(k1 * (-dt));
  T e2 = exp(k2 * (-dt));
  Eigen::Matrix<T, 2, 1> y;
  y[0] = y0[0] * e1;
  y[1] = y0[1] * e2 + y0[0] * k1 * (e1 - e2) / (k2 - k1);
  return y;
}

struct PkConstants {
  double k1 = 1.0;       // population elimination rate, first compartment
  double k2 = 0.5;       // population elimination rate, second compartment
  double dose = 1000.0;  // mass added to the first compartment at each event
  double interval = 1.0; // time between dosing events
};

/// A population of patients dosed on a fixed schedule, each with rates
/// phi_i * k_pop. States stack per patient: y = (y1_1, y2_1, ..., y1_n, y2_n).
struct SteadyStateProblem {
  int n_patients = 0;
  PkConstants constants;
  VectorXd phi;  // per-patient scaling of the population rates

  int n_states() const { return 2 * n_patients; }
  // Sensitivity parameters: the two population rates plus one multiplier per
  // patient rate (nominal 1), so dim = 2 n + 2.
  int n_params() const { return 2 * n_patients + 2; }
};

/// Deterministic instance: phi_i drawn uniformly from [0.7, 1.3) by a seeded
/// SplitMix64 stream. Identical (n, seed, constants) give identical problems.
inline SteadyStateProblem build_problem(int n_patients, std::uint64_t seed,
                                        const PkConstants& constants = {}) {
  if (n_patients < 1) throw InvalidArgumentError("need at least one patient");
  if (!(constants.k1 > 0.0) || !(constants.k2 > 0.0))
    throw InvalidArgumentError("population rates must be positive");
  if (constants.dose < 0.0) throw InvalidArgumentError("dose must be nonnegative");
  if (!(constants.interval > 0.0)) throw InvalidArgumentError("interval must be positive");

  SteadyStateProblem p;
  p.n_patients = n_patients;
  p.constants = constants;
  p.phi = VectorXd(n_patients);
  SplitMix64 rng(seed);
  for (int i = 0; i < n_patients; ++i) {
    p.phi[i] = rng.next_uniform(0.7, 1.3);
    double r1 = p.phi[i] * constants.k1;
    double r2 = p.phi[i] * constants.k2;
    if (std::abs(r1 - r2) <= 1e-8)
      throw InvalidArgumentError("patient rates must be distinct");
  }
  return p;
}

/// Parameter vector layout: [k1_pop, k2_pop, s1_1, s2_1, ..., s1_n, s2_n].
/// The s are per-patient rate multipliers with nominal value 1, so patient
/// i's effective rates are phi_i * k_pop * s; population and per-patient
/// sensitivities are both meaningful at the nominal point.
inline VectorXd nominal_parameters(const SteadyStateProblem& p) {
  VectorXd theta = VectorXd::Ones(p.n_params());
  theta[0] = p.constants.k1;
  theta[1] = p.constants.k2;
  return theta;
}

/// Residual of the dosing-cycle fixed point: dose the first compartment,
/// evolve one interval, subtract the starting state. A root is a pre-dose
/// state the schedule reproduces cycle after cycle.
template <typename T>
VectorX<T> steady_state_residual(const SteadyStateProblem& p, const VectorX<T>& y,
                                 const VectorX<T>& theta) {
  if (y.size() != p.n_states()) throw DimensionError("state size mismatch");
  if (theta.size() != p.n_params()) throw DimensionError("parameter size mismatch");
  VectorX<T> r(y.size());
  for (int i = 0; i < p.n_patients; ++i) {
    T kap1 = theta[0] * p.phi[i] * theta[2 + 2 * i];
    T kap2 = theta[1] * p.phi[i] * theta[3 + 2 * i];
    Eigen::Matrix<T, 2, 1> dosed;
    dosed[0] = y[2 * i] + p.constants.dose;
    dosed[1] = y[2 * i + 1];
    Eigen::Matrix<T, 2, 1> g = evolve(dosed, kap1, kap2, p.constants.interval);
    r[2 * i] = g[0] - y[2 * i];
    r[2 * i + 1] = g[1] - y[2 * i + 1];
  }
  return r;
}

inline VectorXd steady_state_residual(const SteadyStateProblem& p, const VectorXd& y) {
  return steady_state_residual<double>(p, y, nominal_parameters(p));
}

/// Analytic d residual / d state. The evolution operator is linear in the
/// state, so each patient contributes one lower-triangular 2x2 block minus
/// the identity; blocks never couple across patients.
template <typename T>
MatrixX<T> steady_state_jacobian_y(const SteadyStateProblem& p, const VectorX<T>& y,
                                   const VectorX<T>& theta) {
  if (y.size() != p.n_states()) throw DimensionError("state size mismatch");
  const int n = p.n_states();
  MatrixX<T> j(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) j(r, c) = T(0.0);
  for (int i = 0; i < p.n_patients; ++i) {
    T kap1 = theta[0] * p.phi[i] * theta[2 + 2 * i];
    T kap2 = theta[1] * p.phi[i] * theta[3 + 2 * i];
    T e1 = exp(kap1 * (-p.constants.interval));
    T e2 = exp(kap2 * (-p.constants.interval));
    j(2 * i, 2 * i) = e1 - 1.0;
    j(2 * i + 1, 2 * i) = kap1 * (e1 - e2) / (kap2 - kap1);
    j(2 * i + 1, 2 * i + 1) = e2 - 1.0;
  }
  return j;
}

/// Package the fixed-point condition as an algebraic system, optionally
/// carrying the analytic state Jacobian.
inline AlgebraicProblem make_steady_state_algebraic(const SteadyStateProblem& p,
                                                    bool with_analytic_jac = true) {
  auto residual = [p](const auto& y, const auto& theta) {
    using S = typename std::decay_t<decltype(y)>::Scalar;
    return steady_state_residual<S>(p, y, theta);
  };
  if (!with_analytic_jac)
    return make_algebraic_problem(p.n_states(), p.n_params(), residual);
  auto jac = [p](const auto& y, const auto& theta) {
    using S = typename std::decay_t<decltype(y)>::Scalar;
    return steady_state_jacobian_y<S>(p, y, theta);
  };
  return make_algebraic_problem(p.n_states(), p.n_params(), residual, jac);
}

}  // namespace sweep

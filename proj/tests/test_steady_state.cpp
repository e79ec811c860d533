#include <doctest.h>

#include <cmath>

#include "sweep/sweep.hpp"
#include "test_support.hpp"

using namespace sweep;

namespace {

using Vec2 = Eigen::Matrix<double, 2, 1>;

// Classic fourth-order Runge-Kutta on the kinetics ODE, as an integration
// oracle that shares nothing with the closed-form evolution operator.
Vec2 rk4_evolve(Vec2 y, double k1, double k2, double dt, int steps) {
  auto deriv = [&](const Vec2& s) {
    return Vec2(-k1 * s[0], k1 * s[0] - k2 * s[1]);
  };
  double h = dt / steps;
  for (int i = 0; i < steps; ++i) {
    Vec2 a = deriv(y);
    Vec2 b = deriv(Vec2(y + 0.5 * h * a));
    Vec2 c = deriv(Vec2(y + 0.5 * h * b));
    Vec2 d = deriv(Vec2(y + h * c));
    y += (h / 6.0) * (a + 2.0 * b + 2.0 * c + d);
  }
  return y;
}

// Simulate the dosing schedule until the pre-dose state stops moving. The
// cycle map is an affine contraction, so this converges geometrically.
VectorXd cycle_iteration_root(const SteadyStateProblem& p, int cycles) {
  VectorXd theta = nominal_parameters(p);
  VectorXd y = VectorXd::Zero(p.n_states());
  for (int c = 0; c < cycles; ++c) {
    for (int i = 0; i < p.n_patients; ++i) {
      double kap1 = theta[0] * p.phi[i] * theta[2 + 2 * i];
      double kap2 = theta[1] * p.phi[i] * theta[3 + 2 * i];
      Vec2 dosed(y[2 * i] + p.constants.dose, y[2 * i + 1]);
      Vec2 next = evolve<double>(dosed, kap1, kap2, p.constants.interval);
      y[2 * i] = next[0];
      y[2 * i + 1] = next[1];
    }
  }
  return y;
}

SolverConfig zero_start(const AlgebraicProblem& p, double tol = 1e-10) {
  SolverConfig config;
  config.y0 = VectorXd::Zero(p.n_states);
  config.tol = tol;
  return config;
}

}  // namespace

TEST_CASE("evolving over a zero span changes nothing") {
  Vec2 y0(123.25, -4.5);
  Vec2 y = evolve<double>(y0, 1.0, 0.5, 0.0);
  CHECK(y[0] == y0[0]);
  CHECK(y[1] == y0[1]);
}

TEST_CASE("the evolution operator matches direct integration") {
  struct Case {
    double k1, k2, dt;
  };
  const Case cases[] = {{1.0, 0.5, 1.0}, {0.5, 1.0, 1.0}, {2.3, 0.17, 0.75}, {0.9, 1.1, 3.0}};
  for (const Case& c : cases) {
    CAPTURE(c.k1);
    CAPTURE(c.k2);
    Vec2 y0(1000.0, 250.0);
    Vec2 exact = evolve<double>(y0, c.k1, c.k2, c.dt);
    Vec2 integrated = rk4_evolve(y0, c.k1, c.k2, c.dt, 10000);
    CHECK(support::rel_close(exact[0], integrated[0], 1e-8));
    CHECK(support::rel_close(exact[1], integrated[1], 1e-8));
  }
}

TEST_CASE("long spans decay every compartment to nothing") {
  Vec2 y0(1000.0, 500.0);
  Vec2 y = evolve<double>(y0, 1.0, 0.5, 100.0);
  CHECK(std::abs(y[0]) < 1e-15);
  CHECK(std::abs(y[1]) < 1e-15);
}

TEST_CASE("evolution rejects degenerate kinetics") {
  Vec2 y0(1.0, 1.0);
  CHECK_THROWS_AS(evolve<double>(y0, 2.0, 2.0, 1.0), DomainError);
  CHECK_THROWS_AS(evolve<double>(y0, 0.0, 1.0, 1.0), DomainError);
  CHECK_THROWS_AS(evolve<double>(y0, 1.0, -0.5, 1.0), DomainError);
  CHECK_THROWS_AS(evolve<double>(y0, 1.0, 0.5, -1.0), InvalidArgumentError);
}

TEST_CASE("the Newton root agrees with brute-force cycle iteration") {
  SteadyStateProblem p = build_problem(1, 99);
  AlgebraicProblem algebraic = make_steady_state_algebraic(p);
  VectorXd theta = nominal_parameters(p);

  NewtonResult newton = newton_solve(algebraic, theta, zero_start(algebraic));
  VectorXd iterated = cycle_iteration_root(p, 300);

  REQUIRE(newton.y.size() == 2);
  for (int i = 0; i < 2; ++i) CHECK(support::rel_close(newton.y[i], iterated[i], 1e-8));

  VectorXd r = steady_state_residual(p, newton.y);
  CHECK(r.cwiseAbs().maxCoeff() <= 1e-10 * p.constants.dose);
}

TEST_CASE("with no dose the schedule settles at the origin") {
  PkConstants constants;
  constants.dose = 0.0;
  SteadyStateProblem p = build_problem(2, 5, constants);
  AlgebraicProblem algebraic = make_steady_state_algebraic(p);

  SolverConfig config;
  config.y0 = VectorXd::Ones(algebraic.n_states);
  config.tol = 1e-12;
  NewtonResult result = newton_solve(algebraic, nominal_parameters(p), config);
  CHECK(result.y.cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("the state Jacobian is block diagonal and matches the recorded one") {
  SteadyStateProblem p = build_problem(3, 11);
  VectorXd theta = nominal_parameters(p);
  SplitMix64 rng(3);
  VectorXd y = support::random_point(rng, p.n_states(), 10.0, 900.0);

  MatrixXd analytic = steady_state_jacobian_y<double>(p, y, theta);
  for (int r = 0; r < 6; ++r)
    for (int c = 0; c < 6; ++c)
      if (r / 2 != c / 2) CHECK(analytic(r, c) == 0.0);
  for (int i = 0; i < 3; ++i) {
    CHECK(analytic(2 * i, 2 * i + 1) == 0.0);  // first compartment ignores the second
    CHECK(analytic(2 * i, 2 * i) < 0.0);
    CHECK(analytic(2 * i + 1, 2 * i + 1) < 0.0);
  }

  auto in_state = [&](const auto& yv) {
    using S = typename std::decay_t<decltype(yv)>::Scalar;
    VectorX<S> th = theta.template cast<S>();
    return steady_state_residual<S>(p, yv, th);
  };
  MatrixXd recorded = jacobian_auto(in_state, y, p.n_states());
  for (int r = 0; r < 6; ++r)
    for (int c = 0; c < 6; ++c) CHECK(support::rel_close(recorded(r, c), analytic(r, c), 1e-10));
}

TEST_CASE("per-patient sensitivities never cross patients") {
  SteadyStateProblem p = build_problem(2, 21);
  AlgebraicProblem algebraic = make_steady_state_algebraic(p);
  VectorXd theta = nominal_parameters(p);
  SensitivityResult r = solve_and_diff_ift(algebraic, theta, zero_start(algebraic));

  REQUIRE(r.jacobian.rows() == 4);
  REQUIRE(r.jacobian.cols() == 6);
  // multiplier columns of patient j act on patient j's states only
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      if (i == j) continue;
      for (int row = 2 * i; row < 2 * i + 2; ++row)
        for (int col = 2 + 2 * j; col < 4 + 2 * j; ++col)
          CHECK(std::abs(r.jacobian(row, col)) <= 1e-14);
    }
  // population rate columns reach every patient
  for (int row = 0; row < 4; ++row) CHECK(std::abs(r.jacobian(row, 0)) > 1e-6);
}

TEST_CASE("instances are reproducible from their seed") {
  SteadyStateProblem a = build_problem(5, 42);
  SteadyStateProblem b = build_problem(5, 42);
  SteadyStateProblem c = build_problem(5, 43);
  for (int i = 0; i < 5; ++i) CHECK(a.phi[i] == b.phi[i]);
  bool any_differ = false;
  for (int i = 0; i < 5; ++i) any_differ = any_differ || (a.phi[i] != c.phi[i]);
  CHECK(any_differ);
}

TEST_CASE("patient scalings stay inside their band") {
  SteadyStateProblem p = build_problem(50, 7);
  for (int i = 0; i < 50; ++i) {
    CHECK(p.phi[i] >= 0.7);
    CHECK(p.phi[i] < 1.3);
  }
}

TEST_CASE("problem dimensions follow the patient count") {
  SteadyStateProblem p = build_problem(14, 1);
  CHECK(p.n_states() == 28);
  CHECK(p.n_params() == 30);

  VectorXd theta = nominal_parameters(p);
  REQUIRE(theta.size() == 30);
  CHECK(theta[0] == p.constants.k1);
  CHECK(theta[1] == p.constants.k2);
  for (int i = 2; i < 30; ++i) CHECK(theta[i] == 1.0);
}

TEST_CASE("malformed instances and evaluations are rejected") {
  CHECK_THROWS_AS(build_problem(0, 1), InvalidArgumentError);

  PkConstants bad;
  bad.k1 = 0.0;
  CHECK_THROWS_AS(build_problem(1, 1, bad), InvalidArgumentError);
  bad = PkConstants{};
  bad.dose = -1.0;
  CHECK_THROWS_AS(build_problem(1, 1, bad), InvalidArgumentError);
  bad = PkConstants{};
  bad.interval = 0.0;
  CHECK_THROWS_AS(build_problem(1, 1, bad), InvalidArgumentError);
  bad = PkConstants{};
  bad.k2 = bad.k1;  // every patient's two rates collide
  CHECK_THROWS_AS(build_problem(1, 1, bad), InvalidArgumentError);

  SteadyStateProblem p = build_problem(2, 1);
  VectorXd theta = nominal_parameters(p);
  VectorXd short_y = VectorXd::Zero(3);
  VectorXd y = VectorXd::Zero(4);
  VectorXd short_theta = VectorXd::Ones(5);
  CHECK_THROWS_AS(steady_state_residual<double>(p, short_y, theta), DimensionError);
  CHECK_THROWS_AS(steady_state_residual<double>(p, y, short_theta), DimensionError);
}

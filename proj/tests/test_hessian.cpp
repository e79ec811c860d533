#include <doctest.h>

#include <cmath>

#include "sweep/sweep.hpp"
#include "test_support.hpp"

using namespace sweep;

namespace {

// Scalar wrapper over the random program generator: sum of the outputs.
struct ScalarProgram {
  support::RandomProgram program;
  template <typename S>
  S operator()(const VectorX<S>& x) const {
    VectorX<S> y = program(x);
    S acc = y[0];
    for (Eigen::Index i = 1; i < y.size(); ++i) acc = acc + y[i];
    return acc;
  }
};

struct QuadraticForm {
  MatrixXd a;  // symmetric
  template <typename S>
  S operator()(const VectorX<S>& x) const {
    S acc = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i)
      for (Eigen::Index j = 0; j < x.size(); ++j) acc = acc + x[i] * x[j] * (0.5 * a(i, j));
    return acc;
  }
};

// Analytic gradient of the demo density, for differencing into a Hessian
// oracle that never touches the engine's second-order path.
VectorXd demo_gradient(const VectorXd& x) {
  double y = x[0], mu = x[1], sigma = x[2];
  VectorXd g(3);
  g[0] = -(y - mu) / (sigma * sigma);
  g[1] = (y - mu) / (sigma * sigma);
  g[2] = (y - mu) * (y - mu) / (sigma * sigma * sigma) - 1.0 / sigma;
  return g;
}

}  // namespace

TEST_CASE("sum of squares has Hessian 2I") {
  auto f = [](const auto& x) {
    using S = typename std::decay_t<decltype(x)>::Scalar;
    using sweep::square;
    S acc = square(x[0]);
    for (Eigen::Index i = 1; i < x.size(); ++i) acc = acc + square(x[i]);
    return acc;
  };
  VectorXd x(4);
  x << 1.0, -2.0, 3.0, 0.5;
  MatrixXd h = hessian(f, x);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) CHECK(h(i, j) == (i == j ? 2.0 : 0.0));

  VectorXd v(4);
  v << 1.0, 2.0, -1.0, 0.25;
  VectorXd hv = hvp(f, x, v);
  for (int i = 0; i < 4; ++i) CHECK(hv[i] == 2.0 * v[i]);
}

TEST_CASE("quadratic forms reproduce their matrix") {
  MatrixXd a(3, 3);
  a << 4.0, 1.0, -0.5,  //
      1.0, 3.0, 0.25,   //
      -0.5, 0.25, 2.0;
  QuadraticForm f{a};
  VectorXd x(3);
  x << 0.3, -1.2, 2.0;

  MatrixXd h = hessian(f, x);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) CHECK(support::rel_close(h(i, j), a(i, j), 1e-12));

  VectorXd v(3);
  v << -1.0, 0.5, 2.0;
  VectorXd hv = hvp(f, x, v);
  VectorXd expect = a * v;
  for (int i = 0; i < 3; ++i) CHECK(support::rel_close(hv[i], expect[i], 1e-12));
}

TEST_CASE("cubic curvature at a point") {
  auto f = [](const auto& x) {
    using sweep::square;
    return square(x[0]) * x[0];
  };
  VectorXd x(1);
  x << 2.0;
  MatrixXd h = hessian(f, x);
  CHECK(h(0, 0) == 12.0);
}

TEST_CASE("demo density curvature matches differenced analytic gradients") {
  VectorXd x(3);
  x << 10.0, 5.0, 2.0;
  MatrixXd h = hessian(support::normal_logdensity<BasicVar<Dual>>, x);

  CHECK(h(1, 1) == -0.25);  // d2f/dmu2 = -1/sigma^2
  CHECK(h(2, 1) == -1.25);  // d2f/dsigma dmu = -2 (y - mu) / sigma^3

  const double step = 1e-6;
  for (int j = 0; j < 3; ++j) {
    VectorXd hi = x, lo = x;
    hi[j] += step;
    lo[j] -= step;
    VectorXd col = (demo_gradient(hi) - demo_gradient(lo)) / (2.0 * step);
    for (int i = 0; i < 3; ++i) CHECK(support::rel_close(h(i, j), col[i], 1e-5));
  }
}

TEST_CASE("Hessians of random programs are symmetric") {
  SplitMix64 rng(0x4ead);
  for (int round = 0; round < 25; ++round) {
    int n = 2 + static_cast<int>(rng.next() % 3);
    ScalarProgram f{support::make_random_program(rng, n, 2, 12)};
    VectorXd x = support::random_point(rng, n);
    CAPTURE(round);
    MatrixXd h = hessian(f, x);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) CHECK(support::rel_close(h(i, j), h(j, i), 1e-10));
  }
}

TEST_CASE("a Hessian column equals the directional product bit for bit") {
  SplitMix64 rng(0xc01);
  ScalarProgram f{support::make_random_program(rng, 3, 2, 15)};
  VectorXd x = support::random_point(rng, 3);
  MatrixXd h = hessian(f, x);
  for (int col = 0; col < 3; ++col) {
    VectorXd e = VectorXd::Zero(3);
    e[col] = 1.0;
    VectorXd hv = hvp(f, x, e);
    // the replayed recording runs the same arithmetic as a fresh sweep
    for (int i = 0; i < 3; ++i) CHECK(h(i, col) == hv[i]);
  }
}

TEST_CASE("the function is recorded exactly once per Hessian") {
  int calls = 0;
  auto f = [&calls](const auto& x) {
    using S = typename std::decay_t<decltype(x)>::Scalar;
    using sweep::square;
    ++calls;
    S acc = square(x[0]);
    for (Eigen::Index i = 1; i < x.size(); ++i) acc = acc + square(x[i]) * x[0];
    return acc;
  };
  VectorXd x(5);
  x << 1.0, 2.0, 3.0, 4.0, 5.0;
  hessian(f, x);
  CHECK(calls == 1);

  calls = 0;
  hvp(f, x, VectorXd::Ones(5));
  CHECK(calls == 1);
}

TEST_CASE("a first-order seed turns the sweep into a plain gradient") {
  VectorXd x(3);
  x << 10.0, 5.0, 2.0;

  Tape tape;
  support::DemoGraph g = support::record_demo_graph(tape);
  std::vector<double> grad = reverse_sweep(tape, g.f, 1.0);

  HvpSeed seed;
  seed.u = 1.0;
  seed.w = 0.0;
  seed.v = VectorXd::Constant(3, 0.7);  // direction must not leak into the result
  VectorXd out =
      second_order_combination(support::normal_logdensity<BasicVar<Dual>>, x, seed);
  for (int i = 0; i < 3; ++i) CHECK(out[i] == grad[g.x[i].id()]);
}

TEST_CASE("directional curvature matches a second difference") {
  SplitMix64 rng(0xbeef);
  ScalarProgram f{support::make_random_program(rng, 4, 3, 14)};
  VectorXd x = support::random_point(rng, 4);
  VectorXd v = support::random_point(rng, 4, -1.0, 1.0);

  VectorXd hv = hvp(f, x, v);
  double vhv = v.dot(hv);

  const double h = 1e-4;
  double second_difference =
      (f(VectorXd(x + h * v)) - 2.0 * f(x) + f(VectorXd(x - h * v))) / (h * h);
  CHECK(support::rel_close(vhv, second_difference, 1e-4));
}

TEST_CASE("degenerate second-order inputs are rejected or collapse cleanly") {
  auto f = [](const auto& x) {
    using sweep::square;
    return square(x[0]);
  };
  VectorXd empty(0);
  CHECK_THROWS_AS(hessian(f, empty), InvalidArgumentError);

  VectorXd x(2);
  x << 1.0, 2.0;
  VectorXd short_v(1);
  short_v << 1.0;
  CHECK_THROWS_AS(hvp(f, x, short_v), DimensionError);

  auto constant = [](const auto& x) {
    using S = typename std::decay_t<decltype(x)>::Scalar;
    (void)x;
    return S(3.0);
  };
  MatrixXd h = hessian(constant, x);
  CHECK((h.array() == 0.0).all());
}

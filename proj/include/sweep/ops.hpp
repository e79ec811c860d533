#pragma once

#include <cmath>
#include <cstdint>
#include <string>

#include "sweep/errors.hpp"

namespace sweep {

// The elementary operations a tape can record. `pow`, `scale` and `add_const`
// carry one real auxiliary constant (exponent, factor, addend); everything
// else is determined by its parents alone.
enum class Op : std::uint8_t {
  input,
  constant,
  add,
  sub,
  mul,
  div,
  neg,
  log,
  exp,
  sqrt,
  square,
  pow,
  cosh,
  sinh,
  scale,      // x * c
  add_const,  // x + c
};

constexpr const char* op_name(Op op) {
  switch (op) {
    case Op::input: return "input";
    case Op::constant: return "const";
    case Op::add: return "add";
    case Op::sub: return "sub";
    case Op::mul: return "mul";
    case Op::div: return "div";
    case Op::neg: return "neg";
    case Op::log: return "log";
    case Op::exp: return "exp";
    case Op::sqrt: return "sqrt";
    case Op::square: return "square";
    case Op::pow: return "pow";
    case Op::cosh: return "cosh";
    case Op::sinh: return "sinh";
    case Op::scale: return "scale";
    case Op::add_const: return "add_const";
  }
  return "?";
}

constexpr int op_arity(Op op) {
  switch (op) {
    case Op::input:
    case Op::constant:
      return 0;
    case Op::add:
    case Op::sub:
    case Op::mul:
    case Op::div:
      return 2;
    default:
      return 1;
  }
}

// Plain-double shims so the same generic code runs on raw scalars, duals and
// tape variables. primal() strips a differentiable scalar down to its value.
inline double primal(double x) { return x; }
inline bool is_finite(double x) { return std::isfinite(x); }
inline double log(double x) { return std::log(x); }
inline double exp(double x) { return std::exp(x); }
inline double sqrt(double x) { return std::sqrt(x); }
inline double cosh(double x) { return std::cosh(x); }
inline double sinh(double x) { return std::sinh(x); }
inline double square(double x) { return x * x; }
inline double pow(double x, double e) { return std::pow(x, e); }

namespace detail {

template <typename T>
struct UnaryEval {
  T value;
  T d;  // d value / d argument
};

template <typename T>
struct BinaryEval {
  T value;
  T dl;
  T dr;
};

inline void check_pow_domain(double base, double e) {
  if (base > 0.0) return;
  if (base == 0.0) {
    if (e < 1.0) throw DomainError("pow: zero base needs exponent >= 1");
    return;
  }
  if (std::nearbyint(e) != e)
    throw DomainError("pow: negative base needs an integer exponent");
}

// Single source of truth for every primitive's value and local partials,
// evaluated in T arithmetic. Reverse recording, forward duals and tape replay
// all route through here, so the modes cannot disagree on a derivative.
template <typename T>
UnaryEval<T> eval_unary(Op op, const T& a, double aux) {
  switch (op) {
    case Op::neg:
      return {-a, T(-1.0)};
    case Op::log:
      if (!(primal(a) > 0.0)) throw DomainError("log: argument must be positive");
      return {log(a), T(1.0) / a};
    case Op::exp: {
      T v = exp(a);
      return {v, v};
    }
    case Op::sqrt: {
      if (!(primal(a) > 0.0)) throw DomainError("sqrt: argument must be positive");
      T v = sqrt(a);
      return {v, T(0.5) / v};
    }
    case Op::square:
      return {square(a), a * 2.0};
    case Op::pow: {
      check_pow_domain(primal(a), aux);
      if (aux == 0.0) return {T(1.0), T(0.0)};
      if (aux == 1.0) return {a, T(1.0)};
      return {pow(a, aux), pow(a, aux - 1.0) * aux};
    }
    case Op::cosh:
      return {cosh(a), sinh(a)};
    case Op::sinh:
      return {sinh(a), cosh(a)};
    case Op::scale:
      return {a * aux, T(aux)};
    case Op::add_const:
      return {a + aux, T(1.0)};
    default:
      throw InvalidArgumentError(std::string("not a unary op: ") + op_name(op));
  }
}

template <typename T>
BinaryEval<T> eval_binary(Op op, const T& a, const T& b) {
  switch (op) {
    case Op::add:
      return {a + b, T(1.0), T(1.0)};
    case Op::sub:
      return {a - b, T(1.0), T(-1.0)};
    case Op::mul:
      return {a * b, b, a};
    case Op::div: {
      if (primal(b) == 0.0) throw DomainError("div: denominator is zero");
      T q = a / b;
      return {q, T(1.0) / b, -q / b};
    }
    default:
      throw InvalidArgumentError(std::string("not a binary op: ") + op_name(op));
  }
}

}  // namespace detail
}  // namespace sweep

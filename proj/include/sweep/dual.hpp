#pragma once

#include <cstdint>

#include "sweep/errors.hpp"
#include "sweep/ops.hpp"

namespace sweep {

/// Forward-mode scalar: a value paired with its directional derivative along
/// one tangent direction. Arithmetic propagates both components; a plain
/// number converts to a constant dual (tangent 0).
struct Dual {
  double value = 0.0;
  double tangent = 0.0;

  Dual() = default;
  Dual(double v) : value(v) {}  // NOLINT: implicit, constants stay constants
  Dual(double v, double t) : value(v), tangent(t) {}
};

inline double primal(const Dual& d) { return d.value; }
inline bool is_finite(const Dual& d) {
  return std::isfinite(d.value) && std::isfinite(d.tangent);
}

// Work counter for forward sweeps. `values` counts primitive evaluations,
// `fma` counts the multiply-adds spent on tangents. Thread-local so
// concurrent sweeps do not race.
struct DualOpCount {
  std::uint64_t values = 0;
  std::uint64_t fma = 0;
  std::uint64_t total() const { return values + fma; }
};

inline DualOpCount& dual_op_count() {
  thread_local DualOpCount count;
  return count;
}

inline void reset_dual_op_count() { dual_op_count() = DualOpCount{}; }

namespace detail {

inline Dual dual_unary(Op op, const Dual& a, double aux = 0.0) {
  UnaryEval<double> e = eval_unary<double>(op, a.value, aux);
  Dual r{e.value, e.d * a.tangent};
  DualOpCount& c = dual_op_count();
  c.values += 1;
  c.fma += 1;
  if (!is_finite(r))
    throw DomainError(std::string(op_name(op)) + ": non-finite result");
  return r;
}

inline Dual dual_binary(Op op, const Dual& a, const Dual& b) {
  BinaryEval<double> e = eval_binary<double>(op, a.value, b.value);
  Dual r{e.value, e.dl * a.tangent + e.dr * b.tangent};
  DualOpCount& c = dual_op_count();
  c.values += 1;
  c.fma += 2;
  if (!is_finite(r))
    throw DomainError(std::string(op_name(op)) + ": non-finite result");
  return r;
}

}  // namespace detail

inline Dual operator+(const Dual& a, const Dual& b) { return detail::dual_binary(Op::add, a, b); }
inline Dual operator-(const Dual& a, const Dual& b) { return detail::dual_binary(Op::sub, a, b); }
inline Dual operator*(const Dual& a, const Dual& b) { return detail::dual_binary(Op::mul, a, b); }
inline Dual operator/(const Dual& a, const Dual& b) { return detail::dual_binary(Op::div, a, b); }

inline Dual operator-(const Dual& a) { return detail::dual_unary(Op::neg, a); }

// Mixing with plain numbers goes through the constant-carrying kinds so the
// recorded tape path and the dual path perform the same arithmetic.
inline Dual operator+(const Dual& a, double c) { return detail::dual_unary(Op::add_const, a, c); }
inline Dual operator+(double c, const Dual& a) { return detail::dual_unary(Op::add_const, a, c); }
inline Dual operator-(const Dual& a, double c) { return detail::dual_unary(Op::add_const, a, -c); }
inline Dual operator-(double c, const Dual& a) {
  return detail::dual_unary(Op::add_const, detail::dual_unary(Op::neg, a), c);
}
inline Dual operator*(const Dual& a, double c) { return detail::dual_unary(Op::scale, a, c); }
inline Dual operator*(double c, const Dual& a) { return detail::dual_unary(Op::scale, a, c); }
inline Dual operator/(const Dual& a, double c) {
  if (c == 0.0) throw DomainError("div: denominator is zero");
  return detail::dual_unary(Op::scale, a, 1.0 / c);
}
inline Dual operator/(double c, const Dual& a) {
  return detail::dual_unary(Op::scale, detail::dual_unary(Op::pow, a, -1.0), c);
}

inline Dual& operator+=(Dual& a, const Dual& b) { return a = a + b; }
inline Dual& operator-=(Dual& a, const Dual& b) { return a = a - b; }
inline Dual& operator*=(Dual& a, const Dual& b) { return a = a * b; }
inline Dual& operator/=(Dual& a, const Dual& b) { return a = a / b; }

inline Dual log(const Dual& a) { return detail::dual_unary(Op::log, a); }
inline Dual exp(const Dual& a) { return detail::dual_unary(Op::exp, a); }
inline Dual sqrt(const Dual& a) { return detail::dual_unary(Op::sqrt, a); }
inline Dual square(const Dual& a) { return detail::dual_unary(Op::square, a); }
inline Dual pow(const Dual& a, double e) { return detail::dual_unary(Op::pow, a, e); }
inline Dual cosh(const Dual& a) { return detail::dual_unary(Op::cosh, a); }
inline Dual sinh(const Dual& a) { return detail::dual_unary(Op::sinh, a); }

}  // namespace sweep

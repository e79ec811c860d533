#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "sweep/errors.hpp"
#include "sweep/ops.hpp"

namespace sweep {

// Nodes are addressed by their position in the arena. 32 bits comfortably
// covers desk-scale recordings.
using NodeId = std::uint32_t;

// One recorded elementary operation. Parents always precede the node
// (parents[i] < own id), local partials are fixed at recording time, the
// adjoint slot is scratch space for reverse sweeps.
template <typename T>
struct Node {
  Op op = Op::input;
  std::uint8_t n_parents = 0;
  NodeId parents[2] = {0, 0};
  double aux = 0.0;  // exponent / factor / addend for pow, scale, add_const
  T partials[2] = {T(0.0), T(0.0)};
  T value{};
  T adjoint{};
};

// Snapshot of recorded work. n_fma_equivalent is a proxy: one unit per
// primitive value, one per eagerly computed partial, one per multiply-add in
// a reverse sweep.
struct OpCounter {
  std::uint64_t n_nodes = 0;
  std::uint64_t n_fma_equivalent = 0;
};

template <typename T>
class BasicTape;

/// Handle to a scalar. Either attached (a node on some tape) or a detached
/// constant. Detached constants appear when plain numbers flow through
/// generic code; combining one with an attached variable folds it into the
/// recorded operation instead of allocating a node.
template <typename T>
class BasicVar {
 public:
  BasicVar() = default;
  BasicVar(double v) : value_(T(v)) {  // NOLINT: implicit by design
    if (!is_finite(value_)) throw DomainError("constant must be finite");
  }

  bool attached() const { return tape_ != nullptr; }
  BasicTape<T>* tape() const { return tape_; }
  NodeId id() const { return id_; }
  const T& value() const { return value_; }

  // Adjoint accumulated by the most recent sweep. Only attached variables
  // have one.
  T adjoint() const;

  static BasicVar detached(const T& v) {
    BasicVar r;
    r.value_ = v;
    return r;
  }

 private:
  friend class BasicTape<T>;

  BasicVar(BasicTape<T>* tape, NodeId id, const T& v) : tape_(tape), id_(id), value_(v) {}

  BasicTape<T>* tape_ = nullptr;
  NodeId id_ = 0;
  T value_{};
};

/// Append-only arena of recorded operations. clear() drops the recording in
/// one stroke but keeps the allocation, so a tape doubles as a reusable
/// memory region; high_water_mark() survives clears and reports the largest
/// recording the region ever held.
///
/// A tape has one writer at a time. Distinct tapes are fully independent and
/// may be used concurrently.
template <typename T>
class BasicTape {
 public:
  BasicTape() = default;
  BasicTape(const BasicTape&) = delete;
  BasicTape& operator=(const BasicTape&) = delete;
  BasicTape(BasicTape&&) = delete;
  BasicTape& operator=(BasicTape&&) = delete;

  BasicVar<T> new_input(const T& value) {
    if (!is_finite(value)) throw DomainError("input must be finite");
    return append(Node<T>{Op::input, 0, {0, 0}, 0.0, {T(0.0), T(0.0)}, value, T(0.0)});
  }

  BasicVar<T> new_constant(const T& value) {
    if (!is_finite(value)) throw DomainError("constant must be finite");
    return append(Node<T>{Op::constant, 0, {0, 0}, 0.0, {T(0.0), T(0.0)}, value, T(0.0)});
  }

  std::size_t size() const { return nodes_.size(); }
  bool empty() const { return nodes_.empty(); }
  std::size_t high_water_mark() const { return high_water_; }

  void clear() {
    nodes_.clear();
    value_units_ = 0;
    partial_units_ = 0;
    sweep_units_ = 0;
  }

  Node<T>& node(NodeId id) { return nodes_[id]; }
  const Node<T>& node(NodeId id) const { return nodes_[id]; }

  OpCounter op_counter() const {
    return {nodes_.size(), value_units_ + partial_units_ + sweep_units_};
  }
  // Cost of the recorded values alone, the baseline the reverse-sweep
  // overhead bound is measured against.
  std::uint64_t evaluation_units() const { return value_units_; }

  void zero_adjoints() {
    for (Node<T>& n : nodes_) n.adjoint = T(0.0);
  }

  // Recompute every node's value and partials from its parents, in id order.
  // The graph, op kinds and constants stay fixed, so replaying after changing
  // input values re-evaluates the same function at the new point.
  void replay() {
    for (Node<T>& n : nodes_) {
      if (n.n_parents == 1) {
        detail::UnaryEval<T> e = detail::eval_unary<T>(n.op, nodes_[n.parents[0]].value, n.aux);
        n.value = e.value;
        n.partials[0] = e.d;
      } else if (n.n_parents == 2) {
        detail::BinaryEval<T> e =
            detail::eval_binary<T>(n.op, nodes_[n.parents[0]].value, nodes_[n.parents[1]].value);
        n.value = e.value;
        n.partials[0] = e.dl;
        n.partials[1] = e.dr;
      }
      value_units_ += (n.n_parents > 0) ? 1 : 0;
      partial_units_ += n.n_parents;
    }
  }

  BasicVar<T> record_unary(Op op, NodeId parent, double aux = 0.0) {
    detail::UnaryEval<T> e = detail::eval_unary<T>(op, nodes_[parent].value, aux);
    if (!is_finite(e.value) || !is_finite(e.d))
      throw DomainError(std::string(op_name(op)) + ": non-finite result");
    value_units_ += 1;
    partial_units_ += 1;
    return append(Node<T>{op, 1, {parent, 0}, aux, {e.d, T(0.0)}, e.value, T(0.0)});
  }

  BasicVar<T> record_binary(Op op, NodeId pa, NodeId pb) {
    detail::BinaryEval<T> e = detail::eval_binary<T>(op, nodes_[pa].value, nodes_[pb].value);
    if (!is_finite(e.value) || !is_finite(e.dl) || !is_finite(e.dr))
      throw DomainError(std::string(op_name(op)) + ": non-finite result");
    value_units_ += 1;
    partial_units_ += 2;
    return append(Node<T>{op, 2, {pa, pb}, 0.0, {e.dl, e.dr}, e.value, T(0.0)});
  }

  void count_sweep_units(std::uint64_t units) { sweep_units_ += units; }

 private:
  BasicVar<T> append(Node<T> n) {
    nodes_.push_back(n);
    if (nodes_.size() > high_water_) high_water_ = nodes_.size();
    NodeId id = static_cast<NodeId>(nodes_.size() - 1);
    return BasicVar<T>(this, id, nodes_.back().value);
  }

  std::vector<Node<T>> nodes_;
  std::size_t high_water_ = 0;
  std::uint64_t value_units_ = 0;
  std::uint64_t partial_units_ = 0;
  std::uint64_t sweep_units_ = 0;
};

using Tape = BasicTape<double>;
using Var = BasicVar<double>;

template <typename T>
double primal(const BasicVar<T>& v) {
  return primal(v.value());
}
template <typename T>
bool is_finite(const BasicVar<T>& v) {
  return is_finite(v.value());
}

template <typename T>
T BasicVar<T>::adjoint() const {
  if (!attached()) throw InvalidArgumentError("detached constant has no adjoint");
  return tape_->node(id_).adjoint;
}

namespace detail {

// Common tape of two operands: both attached => must match; one attached =>
// that one; neither => nullptr (pure constant folding).
template <typename T>
BasicTape<T>* common_tape(const BasicVar<T>& a, const BasicVar<T>& b) {
  if (a.attached() && b.attached()) {
    if (a.tape() != b.tape()) throw TapeMismatchError();
    return a.tape();
  }
  return a.attached() ? a.tape() : b.tape();
}

// A detached constant folded into an operation's auxiliary slot. Detached
// values never carry tangents, so the primal is the whole story.
template <typename T>
double aux_of(const BasicVar<T>& v) {
  return primal(v.value());
}

template <typename T>
BasicVar<T> fold_unary(Op op, const BasicVar<T>& a, double aux = 0.0) {
  UnaryEval<T> e = eval_unary<T>(op, a.value(), aux);
  if (!is_finite(e.value))
    throw DomainError(std::string(op_name(op)) + ": non-finite result");
  return BasicVar<T>::detached(e.value);
}

template <typename T>
BasicVar<T> apply_unary(Op op, const BasicVar<T>& a, double aux = 0.0) {
  if (!a.attached()) return fold_unary(op, a, aux);
  return a.tape()->record_unary(op, a.id(), aux);
}

}  // namespace detail

template <typename T>
BasicVar<T> operator+(const BasicVar<T>& a, const BasicVar<T>& b) {
  BasicTape<T>* t = detail::common_tape(a, b);
  if (!t) {
    detail::BinaryEval<T> e = detail::eval_binary<T>(Op::add, a.value(), b.value());
    return BasicVar<T>::detached(e.value);
  }
  if (a.attached() && b.attached()) return t->record_binary(Op::add, a.id(), b.id());
  if (a.attached()) return t->record_unary(Op::add_const, a.id(), detail::aux_of(b));
  return t->record_unary(Op::add_const, b.id(), detail::aux_of(a));
}

template <typename T>
BasicVar<T> operator-(const BasicVar<T>& a, const BasicVar<T>& b) {
  BasicTape<T>* t = detail::common_tape(a, b);
  if (!t) {
    detail::BinaryEval<T> e = detail::eval_binary<T>(Op::sub, a.value(), b.value());
    return BasicVar<T>::detached(e.value);
  }
  if (a.attached() && b.attached()) return t->record_binary(Op::sub, a.id(), b.id());
  if (a.attached()) return t->record_unary(Op::add_const, a.id(), -detail::aux_of(b));
  // c - x == (-x) + c
  BasicVar<T> nb = t->record_unary(Op::neg, b.id());
  return t->record_unary(Op::add_const, nb.id(), detail::aux_of(a));
}

template <typename T>
BasicVar<T> operator*(const BasicVar<T>& a, const BasicVar<T>& b) {
  BasicTape<T>* t = detail::common_tape(a, b);
  if (!t) {
    detail::BinaryEval<T> e = detail::eval_binary<T>(Op::mul, a.value(), b.value());
    return BasicVar<T>::detached(e.value);
  }
  if (a.attached() && b.attached()) return t->record_binary(Op::mul, a.id(), b.id());
  if (a.attached()) return t->record_unary(Op::scale, a.id(), detail::aux_of(b));
  return t->record_unary(Op::scale, b.id(), detail::aux_of(a));
}

template <typename T>
BasicVar<T> operator/(const BasicVar<T>& a, const BasicVar<T>& b) {
  BasicTape<T>* t = detail::common_tape(a, b);
  if (!t) {
    detail::BinaryEval<T> e = detail::eval_binary<T>(Op::div, a.value(), b.value());
    return BasicVar<T>::detached(e.value);
  }
  if (a.attached() && b.attached()) return t->record_binary(Op::div, a.id(), b.id());
  if (a.attached()) {
    double c = detail::aux_of(b);
    if (c == 0.0) throw DomainError("div: denominator is zero");
    return t->record_unary(Op::scale, a.id(), 1.0 / c);
  }
  // c / x == c * x^-1
  BasicVar<T> inv = t->record_unary(Op::pow, b.id(), -1.0);
  return t->record_unary(Op::scale, inv.id(), detail::aux_of(a));
}

template <typename T>
BasicVar<T> operator-(const BasicVar<T>& a) {
  return detail::apply_unary(Op::neg, a);
}

template <typename T>
BasicVar<T> operator+(const BasicVar<T>& a, double c) {
  return detail::apply_unary(Op::add_const, a, c);
}
template <typename T>
BasicVar<T> operator+(double c, const BasicVar<T>& a) {
  return detail::apply_unary(Op::add_const, a, c);
}
template <typename T>
BasicVar<T> operator-(const BasicVar<T>& a, double c) {
  return detail::apply_unary(Op::add_const, a, -c);
}
template <typename T>
BasicVar<T> operator-(double c, const BasicVar<T>& a) {
  return a.attached() ? detail::apply_unary(Op::add_const, -a, c)
                      : BasicVar<T>(c) - a;
}
template <typename T>
BasicVar<T> operator*(const BasicVar<T>& a, double c) {
  return detail::apply_unary(Op::scale, a, c);
}
template <typename T>
BasicVar<T> operator*(double c, const BasicVar<T>& a) {
  return detail::apply_unary(Op::scale, a, c);
}
template <typename T>
BasicVar<T> operator/(const BasicVar<T>& a, double c) {
  if (c == 0.0) throw DomainError("div: denominator is zero");
  return detail::apply_unary(Op::scale, a, 1.0 / c);
}
template <typename T>
BasicVar<T> operator/(double c, const BasicVar<T>& a) {
  if (!a.attached()) return BasicVar<T>(c) / a;
  BasicVar<T> inv = detail::apply_unary(Op::pow, a, -1.0);
  return detail::apply_unary(Op::scale, inv, c);
}

template <typename T>
BasicVar<T>& operator+=(BasicVar<T>& a, const BasicVar<T>& b) { return a = a + b; }
template <typename T>
BasicVar<T>& operator-=(BasicVar<T>& a, const BasicVar<T>& b) { return a = a - b; }
template <typename T>
BasicVar<T>& operator*=(BasicVar<T>& a, const BasicVar<T>& b) { return a = a * b; }
template <typename T>
BasicVar<T>& operator/=(BasicVar<T>& a, const BasicVar<T>& b) { return a = a / b; }

template <typename T>
BasicVar<T> log(const BasicVar<T>& a) { return detail::apply_unary(Op::log, a); }
template <typename T>
BasicVar<T> exp(const BasicVar<T>& a) { return detail::apply_unary(Op::exp, a); }
template <typename T>
BasicVar<T> sqrt(const BasicVar<T>& a) { return detail::apply_unary(Op::sqrt, a); }
template <typename T>
BasicVar<T> square(const BasicVar<T>& a) { return detail::apply_unary(Op::square, a); }
template <typename T>
BasicVar<T> pow(const BasicVar<T>& a, double e) { return detail::apply_unary(Op::pow, a, e); }
template <typename T>
BasicVar<T> cosh(const BasicVar<T>& a) { return detail::apply_unary(Op::cosh, a); }
template <typename T>
BasicVar<T> sinh(const BasicVar<T>& a) { return detail::apply_unary(Op::sinh, a); }

/// Multi-output reverse sweep. Zeroes all adjoint slots, seeds each output
/// with its weight, then visits nodes in strictly decreasing id order,
/// pushing adjoint * partial to each parent. Values are untouched; adjoints
/// stay in the arena for reading via BasicVar::adjoint().
template <typename T>
void accumulate_adjoints(BasicTape<T>& tape, std::span<const BasicVar<T>> outputs,
                         std::span<const T> weights) {
  if (outputs.size() != weights.size())
    throw DimensionError("accumulate_adjoints: outputs/weights size mismatch");
  tape.zero_adjoints();
  bool any = false;
  NodeId top = 0;
  for (std::size_t i = 0; i < outputs.size(); ++i) {
    if (!is_finite(weights[i])) throw DomainError("sweep seed must be finite");
    if (!outputs[i].attached()) continue;  // constant output: nothing flows back
    if (outputs[i].tape() != &tape) throw TapeMismatchError();
    tape.node(outputs[i].id()).adjoint += weights[i];
    if (outputs[i].id() > top) top = outputs[i].id();
    any = true;
  }
  if (!any || tape.empty()) return;

  std::uint64_t units = 0;
  for (NodeId id = top;; --id) {
    const Node<T>& n = tape.node(id);
    for (int p = 0; p < n.n_parents; ++p) {
      tape.node(n.parents[p]).adjoint += n.partials[p] * n.adjoint;
    }
    units += n.n_parents;
    if (id == 0) break;
  }
  tape.count_sweep_units(units);
}

/// Single-output reverse sweep: gradient of `output` scaled by `seed`.
/// Returns the adjoint of every node on the tape, index == NodeId.
template <typename T>
std::vector<T> reverse_sweep(BasicTape<T>& tape, const BasicVar<T>& output, const T& seed) {
  if (!output.attached() || output.tape() != &tape)
    throw TapeMismatchError();
  accumulate_adjoints(tape, std::span<const BasicVar<T>>(&output, 1),
                      std::span<const T>(&seed, 1));
  std::vector<T> adjoints(tape.size());
  for (std::size_t i = 0; i < adjoints.size(); ++i)
    adjoints[i] = tape.node(static_cast<NodeId>(i)).adjoint;
  return adjoints;
}

}  // namespace sweep

#pragma once

#include <Eigen/Core>

#include "sweep/dual.hpp"
#include "sweep/tape.hpp"

// Scalar traits must be visible before any Matrix<...> over these types is
// named, so they come first in this header.
namespace Eigen {

template <>
struct NumTraits<sweep::Dual> : NumTraits<double> {
  using Real = sweep::Dual;
  using NonInteger = sweep::Dual;
  using Nested = sweep::Dual;
  using Literal = double;
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 1,
    AddCost = 2,
    MulCost = 2,
  };
};

template <typename T>
struct NumTraits<sweep::BasicVar<T>> : NumTraits<double> {
  using Real = sweep::BasicVar<T>;
  using NonInteger = sweep::BasicVar<T>;
  using Nested = sweep::BasicVar<T>;
  using Literal = double;
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 2,
    AddCost = 8,
    MulCost = 8,
  };
};

template <typename BinOp>
struct ScalarBinaryOpTraits<sweep::Dual, double, BinOp> {
  using ReturnType = sweep::Dual;
};
template <typename BinOp>
struct ScalarBinaryOpTraits<double, sweep::Dual, BinOp> {
  using ReturnType = sweep::Dual;
};
template <typename T, typename BinOp>
struct ScalarBinaryOpTraits<sweep::BasicVar<T>, double, BinOp> {
  using ReturnType = sweep::BasicVar<T>;
};
template <typename T, typename BinOp>
struct ScalarBinaryOpTraits<double, sweep::BasicVar<T>, BinOp> {
  using ReturnType = sweep::BasicVar<T>;
};

}  // namespace Eigen

namespace sweep {

template <typename T>
using VectorX = Eigen::Matrix<T, Eigen::Dynamic, 1>;
template <typename T>
using MatrixX = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;

using Eigen::MatrixXd;
using Eigen::VectorXd;

template <typename T>
VectorX<T> primal_values(const VectorX<BasicVar<T>>& v) {
  VectorX<T> out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) out[i] = v[i].value();
  return out;
}

inline VectorXd primal_values(const VectorX<Dual>& v) {
  VectorXd out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) out[i] = v[i].value;
  return out;
}

}  // namespace sweep

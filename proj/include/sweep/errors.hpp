#pragma once

#include <stdexcept>
#include <string>

namespace sweep {

// Base class for every error the engine throws.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Two variables living on different tapes were combined.
struct TapeMismatchError : Error {
  TapeMismatchError() : Error("variables belong to different tapes") {}
};

// An elementary operation was applied outside its domain, or produced a
// non-finite value or partial.
struct DomainError : Error {
  using Error::Error;
};

// Vector/matrix shapes do not line up.
struct DimensionError : Error {
  using Error::Error;
};

struct InvalidArgumentError : Error {
  using Error::Error;
};

// Iterative solve stopped at max_iter without meeting the tolerance.
struct NonConvergenceError : Error {
  NonConvergenceError(int iters, double residual_norm)
      : Error("solver did not converge after " + std::to_string(iters) +
              " iterations (residual max-norm " + std::to_string(residual_norm) + ")"),
        iterations(iters),
        residual(residual_norm) {}
  int iterations;
  double residual;
};

// A pivot fell below the singularity threshold during factorization.
struct SingularJacobianError : Error {
  SingularJacobianError() : Error("matrix is singular to working precision") {}
  explicit SingularJacobianError(const std::string& what) : Error(what) {}
};

}  // namespace sweep

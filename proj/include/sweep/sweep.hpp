#pragma once

// Convenience include for the whole library.

#include "sweep/bench.hpp"
#include "sweep/checkpoint.hpp"
#include "sweep/dot.hpp"
#include "sweep/dual.hpp"
#include "sweep/eigen_support.hpp"
#include "sweep/errors.hpp"
#include "sweep/hessian.hpp"
#include "sweep/jacobian.hpp"
#include "sweep/lu.hpp"
#include "sweep/matexp2.hpp"
#include "sweep/ops.hpp"
#include "sweep/rng.hpp"
#include "sweep/solver.hpp"
#include "sweep/steady_state.hpp"
#include "sweep/tape.hpp"

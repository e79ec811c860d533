#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <map>
#include <utility>
#include <vector>

#include "sweep/eigen_support.hpp"
#include "sweep/errors.hpp"
#include "sweep/tape.hpp"

namespace sweep {

/// One stage of a staged map. Built from a single generic callable, erased
/// twice: once for plain evaluation, once for recording.
class Stage {
 public:
  template <typename F>
  Stage(Eigen::Index in_dim, Eigen::Index out_dim, F f)
      : in_dim_(in_dim), out_dim_(out_dim), value_(f), record_(std::move(f)) {
    if (in_dim < 1 || out_dim < 1) throw DimensionError("stage dims must be positive");
  }

  Eigen::Index in_dim() const { return in_dim_; }
  Eigen::Index out_dim() const { return out_dim_; }

  VectorXd run(const VectorXd& x) const {
    check_in(x.size());
    VectorXd y = value_(x);
    check_out(y.size());
    return y;
  }
  VectorX<Var> run(const VectorX<Var>& x) const {
    check_in(x.size());
    VectorX<Var> y = record_(x);
    check_out(y.size());
    return y;
  }

 private:
  void check_in(Eigen::Index n) const {
    if (n != in_dim_) throw DimensionError("stage input dim mismatch");
  }
  void check_out(Eigen::Index n) const {
    if (n != out_dim_) throw DimensionError("stage output dim mismatch");
  }

  Eigen::Index in_dim_;
  Eigen::Index out_dim_;
  std::function<VectorXd(const VectorXd&)> value_;
  std::function<VectorX<Var>(const VectorX<Var>&)> record_;
};

/// A composition f_L ∘ ... ∘ f_1 with checkpointable stage boundaries.
/// Stages are 1-indexed in the public API to match split positions.
class SegmentedProgram {
 public:
  template <typename F>
  void add_stage(Eigen::Index in_dim, Eigen::Index out_dim, F f) {
    Stage s(in_dim, out_dim, std::move(f));
    if (!stages_.empty() && stages_.back().out_dim() != in_dim)
      throw DimensionError("stage dims do not compose");
    stages_.push_back(std::move(s));
  }

  int n_stages() const { return static_cast<int>(stages_.size()); }
  bool empty() const { return stages_.empty(); }
  Eigen::Index input_dim() const { return stages_.front().in_dim(); }
  Eigen::Index output_dim() const { return stages_.back().out_dim(); }
  const Stage& stage(int l) const { return stages_[static_cast<std::size_t>(l - 1)]; }

 private:
  std::vector<Stage> stages_;
};

/// Split positions partition [1, L] into segments; a split at s means "a
/// segment boundary after stage s". `snapshots` is the subset of splits whose
/// intermediate state the snapshot strategy keeps in memory.
struct CheckpointPlan {
  std::vector<int> splits;
  std::vector<int> snapshots;
};

enum class Strategy {
  recompute_all,  // store nothing, rerun from the input for every segment
  store_all,      // store the state at every split
  snapshots,      // store the states listed in plan.snapshots
};

/// K-1 splits spread as evenly as floor division allows; every split is
/// also a snapshot.
inline CheckpointPlan equispaced_plan(int n_stages, int n_segments) {
  if (n_segments < 1 || n_segments > n_stages)
    throw InvalidArgumentError("equispaced_plan: need 1 <= segments <= stages");
  CheckpointPlan plan;
  for (int k = 1; k < n_segments; ++k)
    plan.splits.push_back(k * n_stages / n_segments);
  plan.snapshots = plan.splits;
  return plan;
}

struct CheckpointResult {
  VectorXd value;           // f(x)
  VectorXd grad;            // J^T * w
  std::size_t peak_nodes;   // largest simultaneous tape size
  std::size_t stage_evals;  // total forward stage executions, recorded or not
};

namespace detail {

inline void validate_plan(const CheckpointPlan& plan, int n_stages) {
  int prev = 0;
  for (int s : plan.splits) {
    if (s <= prev || s >= n_stages)
      throw InvalidArgumentError("splits must be strictly increasing within [1, L-1]");
    prev = s;
  }
  for (int s : plan.snapshots) {
    if (std::find(plan.splits.begin(), plan.splits.end(), s) == plan.splits.end())
      throw InvalidArgumentError("snapshots must be a subset of splits");
  }
}

}  // namespace detail

/// Reverse-mode gradient of a staged program, one segment at a time. Each
/// segment is recorded, swept with the running cotangent, then cleared; the
/// tape never holds more than one segment. Segment inputs come from stored
/// snapshot states when available, otherwise from rerunning earlier stages.
///
/// recompute_all keeps no snapshots (triangular rerun cost), store_all keeps
/// one per split (at most one extra pass), snapshots interpolates.
inline CheckpointResult grad_checkpointed(const SegmentedProgram& program, const VectorXd& x,
                                          const VectorXd& w, const CheckpointPlan& plan,
                                          Strategy strategy) {
  if (program.empty()) throw InvalidArgumentError("program has no stages");
  if (x.size() != program.input_dim()) throw DimensionError("input dim mismatch");
  if (w.size() != program.output_dim()) throw DimensionError("cotangent dim mismatch");
  detail::validate_plan(plan, program.n_stages());

  const int L = program.n_stages();
  std::vector<int> keep;  // split positions whose state we hold on to
  switch (strategy) {
    case Strategy::recompute_all: break;
    case Strategy::store_all: keep = plan.splits; break;
    case Strategy::snapshots: keep = plan.snapshots; break;
  }

  // Segment boundaries 0 = b_0 < b_1 < ... < b_K = L.
  std::vector<int> b;
  b.push_back(0);
  for (int s : plan.splits) b.push_back(s);
  b.push_back(L);
  const int K = static_cast<int>(b.size()) - 1;

  std::map<int, VectorXd> stored;
  stored[0] = x;

  Tape tape;
  CheckpointResult result;
  result.stage_evals = 0;
  VectorXd cotangent = w;

  for (int k = K; k >= 1; --k) {
    const int start = b[static_cast<std::size_t>(k - 1)];
    const int end = b[static_cast<std::size_t>(k)];

    // Plain forward run from the nearest state at or before `start`. Only the
    // initial pass (k == K) populates snapshots.
    auto base = stored.upper_bound(start);
    --base;  // stored[0] always exists
    VectorXd state = base->second;
    for (int l = base->first + 1; l <= start; ++l) {
      state = program.stage(l).run(state);
      ++result.stage_evals;
      if (k == K && std::find(keep.begin(), keep.end(), l) != keep.end()) stored[l] = state;
    }

    // Record the segment and sweep it with the running cotangent.
    tape.clear();
    VectorX<Var> seg(state.size());
    for (Eigen::Index i = 0; i < state.size(); ++i) seg[i] = tape.new_input(state[i]);
    VectorX<Var> inputs = seg;
    for (int l = start + 1; l <= end; ++l) {
      seg = program.stage(l).run(seg);
      ++result.stage_evals;
    }
    if (k == K) result.value = primal_values(seg);

    accumulate_adjoints<double>(tape, {seg.data(), static_cast<std::size_t>(seg.size())},
                                {cotangent.data(), static_cast<std::size_t>(cotangent.size())});
    VectorXd next(inputs.size());
    for (Eigen::Index i = 0; i < inputs.size(); ++i) next[i] = inputs[i].adjoint();
    cotangent = std::move(next);
  }

  result.grad = std::move(cotangent);
  result.peak_nodes = tape.high_water_mark();
  return result;
}

}  // namespace sweep

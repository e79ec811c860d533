#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <fstream>
#include <string>
#include <tuple>
#include <vector>

#include "sweep/eigen_support.hpp"
#include "sweep/errors.hpp"
#include "sweep/matexp2.hpp"
#include "sweep/rng.hpp"
#include "sweep/solver.hpp"
#include "sweep/steady_state.hpp"
#include "sweep/tape.hpp"

namespace sweep {

enum class BenchKind { matexp, algebra };

struct BenchOptions {
  std::vector<int> state_counts{4, 12, 20, 28};
  double tol = 1e-10;
  PkConstants constants;
};

struct BenchRecord {
  std::string bench_name;
  std::string method;
  int n_states = 0;
  int rep = 0;  // 1-based
  std::int64_t runtime_ns = 0;
};

struct BenchOutcome {
  std::vector<BenchRecord> rows;
  bool solver_failure = false;
};

namespace detail {

inline std::int64_t elapsed_ns(std::chrono::steady_clock::time_point start) {
  auto stop = std::chrono::steady_clock::now();
  return std::chrono::duration_cast<std::chrono::nanoseconds>(stop - start).count();
}

/// One full pass over the batch: record each matrix on the shared tape and
/// pull all 16 entry gradients. Returns a checksum so the work cannot be
/// optimized away.
inline double matexp_batch(Tape& tape, const std::vector<Matrix2<double>>& batch,
                           bool optimized) {
  double checksum = 0.0;
  std::array<double, 1> one = {1.0};
  for (const auto& m : batch) {
    tape.clear();
    Matrix2<Var> a;
    a(0, 0) = tape.new_input(m(0, 0));
    a(0, 1) = tape.new_input(m(0, 1));
    a(1, 0) = tape.new_input(m(1, 0));
    a(1, 1) = tape.new_input(m(1, 1));
    Matrix2<Var> e = optimized ? matexp2_optimized(a) : matexp2_standard(a);
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 2; ++c) {
        std::array<Var, 1> out = {e(r, c)};
        accumulate_adjoints(tape, std::span<const Var>(out), std::span<const double>(one));
        for (int k = 0; k < 4; ++k) checksum += a(k / 2, k % 2).adjoint();
      }
  }
  return checksum;
}

inline void run_matexp_bench(const BenchOptions&, int repeats, std::uint64_t seed,
                             BenchOutcome& out) {
  SplitMix64 rng(seed);
  std::vector<Matrix2<double>> batch(1000);
  for (auto& m : batch)
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 2; ++c) m(r, c) = rng.next_uniform(1.0, 10.0);

  double sink = 0.0;
  Tape tape;
  for (const char* method : {"standard", "optimized"}) {
    bool optimized = std::string(method) == "optimized";
    sink += matexp_batch(tape, batch, optimized);  // warm-up, not recorded
    for (int rep = 1; rep <= repeats; ++rep) {
      auto start = std::chrono::steady_clock::now();
      sink += matexp_batch(tape, batch, optimized);
      out.rows.push_back({"matexp", method, 2, rep, elapsed_ns(start)});
    }
  }
  if (!is_finite(sink)) throw Error("matexp bench produced non-finite values");
}

inline void run_algebra_bench(const BenchOptions& options, int repeats, std::uint64_t seed,
                              BenchOutcome& out) {
  for (int n_states : options.state_counts) {
    if (n_states < 2 || n_states % 2 != 0)
      throw InvalidArgumentError("state counts must be even and at least 2");
    SteadyStateProblem ssp =
        build_problem(n_states / 2, seed + static_cast<std::uint64_t>(n_states),
                      options.constants);
    AlgebraicProblem with_jac = make_steady_state_algebraic(ssp, true);
    AlgebraicProblem ad_jac = make_steady_state_algebraic(ssp, false);
    VectorXd theta = nominal_parameters(ssp);
    SolverConfig config;
    config.y0 = VectorXd::Zero(ssp.n_states());
    config.tol = options.tol;

    struct Method {
      const char* name;
      const AlgebraicProblem* problem;
      bool naive;
    };
    const Method methods[] = {
        {"naive", &with_jac, true},
        {"ift_analytic_Jy", &with_jac, false},
        {"ift_ad_Jy", &ad_jac, false},
    };
    for (const Method& method : methods) {
      auto run_once = [&]() {
        if (method.naive)
          return solve_and_diff_naive(*method.problem, theta, config);
        return solve_and_diff_ift(*method.problem, theta, config);
      };
      try {
        run_once();  // warm-up, not recorded
      } catch (const Error&) {
        // the timed repeats below report the failure
      }
      for (int rep = 1; rep <= repeats; ++rep) {
        std::string name = method.name;
        auto start = std::chrono::steady_clock::now();
        try {
          SensitivityResult result = run_once();
          if (!result.jacobian.allFinite()) throw Error("non-finite sensitivities");
        } catch (const Error&) {
          name += "_failed";
          out.solver_failure = true;
        }
        out.rows.push_back({"algebra", name, n_states, rep, elapsed_ns(start)});
      }
    }
  }
}

}  // namespace detail

inline void write_bench_csv(const BenchOutcome& outcome, BenchKind kind, int repeats,
                            std::uint64_t seed, const std::string& path) {
  std::ofstream file(path, std::ios::binary);  // binary keeps line endings LF everywhere
  if (!file) throw Error("cannot open output file: " + path);
  file << "# bench=" << (kind == BenchKind::matexp ? "matexp" : "algebra")
       << " seed=" << seed << " repeats=" << repeats << "\n";
  file << "bench_name,method,n_states,rep,runtime_ns\n";
  for (const BenchRecord& row : outcome.rows)
    file << row.bench_name << ',' << row.method << ',' << row.n_states << ',' << row.rep
         << ',' << row.runtime_ns << "\n";
  if (!file) throw Error("failed writing output file: " + path);
}

/// Runs the named benchmark, returns every timed repeat, and (when path is
/// nonempty) writes the sorted rows as CSV. Rows are ordered by
/// (bench_name, method, n_states, rep); rep numbering starts at 1 and each
/// (method, size) pair gets one discarded warm-up run first.
inline BenchOutcome run_bench(BenchKind kind, const BenchOptions& options, int repeats,
                              std::uint64_t seed, const std::string& out_path = "") {
  if (repeats < 1) throw InvalidArgumentError("repeats must be at least 1");
  BenchOutcome outcome;
  if (kind == BenchKind::matexp)
    detail::run_matexp_bench(options, repeats, seed, outcome);
  else
    detail::run_algebra_bench(options, repeats, seed, outcome);
  std::sort(outcome.rows.begin(), outcome.rows.end(),
            [](const BenchRecord& a, const BenchRecord& b) {
              return std::tie(a.bench_name, a.method, a.n_states, a.rep) <
                     std::tie(b.bench_name, b.method, b.n_states, b.rep);
            });
  if (!out_path.empty()) write_bench_csv(outcome, kind, repeats, seed, out_path);
  return outcome;
}

}  // namespace sweep

// Command-line driver for the timing benchmarks, plus a DOT export of the
// demo gradient graph. Exit codes: 0 success, 1 usage error, 2 solver failure.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sweep/bench.hpp"
#include "sweep/dot.hpp"
#include "sweep/tape.hpp"

namespace {

// Log-density of a normal distribution at (y, mu, sigma) = (10, 5, 2); the
// ten-node graph used throughout the tests as a worked example. One statement
// per operation so the recorded layout does not depend on the compiler's
// subexpression ordering.
std::string demo_graph_dot() {
  sweep::Tape tape;
  sweep::Var y = tape.new_input(10.0);
  sweep::Var mu = tape.new_input(5.0);
  sweep::Var sigma = tape.new_input(2.0);
  sweep::Var z = (y - mu) / sigma;
  sweep::Var q = square(z);
  sweep::Var scaled = q * -0.5;
  sweep::Var log_sigma = log(sigma);
  sweep::Var f = scaled - log_sigma;
  f = f - 0.5 * std::log(2.0 * std::numbers::pi);
  return sweep::export_dot(tape, f);
}

std::int64_t median_ns(std::vector<std::int64_t> v) {
  std::sort(v.begin(), v.end());
  size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2;
}

void print_summary(const sweep::BenchOutcome& outcome) {
  std::map<std::pair<std::string, int>, std::vector<std::int64_t>> groups;
  for (const auto& row : outcome.rows)
    groups[{row.method, row.n_states}].push_back(row.runtime_ns);
  std::cout << "method,n_states,median_ns\n";
  for (auto& [key, times] : groups)
    std::cout << key.first << ',' << key.second << ',' << median_ns(times) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"timing benchmarks for the sweep differentiation library"};
  std::string name;
  int repeats = 5;
  std::uint64_t seed = 42;
  std::string out_path;
  std::string dot_path;
  sweep::BenchOptions options;

  app.add_option("--name", name, "benchmark to run: matexp or algebra");
  app.add_option("--repeats", repeats, "timed repeats per method and size");
  app.add_option("--seed", seed, "seed for deterministic problem generation");
  app.add_option("--out", out_path, "write all timed rows as CSV to this path");
  app.add_option("--states", options.state_counts,
                 "state counts for the algebra benchmark")
      ->delimiter(',');
  app.add_option("--tol", options.tol, "solver tolerance for the algebra benchmark");
  app.add_option("--k1", options.constants.k1, "population rate, first compartment");
  app.add_option("--k2", options.constants.k2, "population rate, second compartment");
  app.add_option("--dose", options.constants.dose, "dose added at each event");
  app.add_option("--dt", options.constants.interval, "dosing interval");
  app.add_option("--dot", dot_path, "write the demo gradient graph as DOT to this path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  if (name.empty() && dot_path.empty()) {
    std::cerr << "nothing to do: pass --name matexp|algebra and/or --dot PATH\n\n"
              << app.help();
    return 1;
  }

  try {
    if (!dot_path.empty()) {
      std::ofstream file(dot_path, std::ios::binary);
      if (!file) {
        std::cerr << "cannot open " << dot_path << "\n";
        return 1;
      }
      file << demo_graph_dot();
      std::cout << "wrote " << dot_path << "\n";
    }

    if (!name.empty()) {
      sweep::BenchKind kind;
      if (name == "matexp")
        kind = sweep::BenchKind::matexp;
      else if (name == "algebra")
        kind = sweep::BenchKind::algebra;
      else {
        std::cerr << "unknown benchmark '" << name << "'; expected matexp or algebra\n";
        return 1;
      }
      sweep::BenchOutcome outcome = sweep::run_bench(kind, options, repeats, seed, out_path);
      print_summary(outcome);
      if (!out_path.empty())
        std::cout << outcome.rows.size() << " rows written to " << out_path << "\n";
      if (outcome.solver_failure) {
        std::cerr << "solver failed on at least one configuration\n";
        return 2;
      }
    }
  } catch (const sweep::InvalidArgumentError& e) {
    std::cerr << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }
  return 0;
}

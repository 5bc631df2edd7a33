#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace fpdot {

/// A parsed command line, independent of any argv plumbing so the dispatch
/// logic stays testable in-process.
struct CliRequest {
  std::string command;  // solve | exact | sweep | constrained | verify
  std::optional<std::string> instance_path;
  std::optional<std::string> cost_csv_path;   // --cost-csv
  std::optional<double> epsilon;              // --epsilon
  int max_iterations = 10000;                 // --max-iter
  double tolerance = 1e-9;                    // --tol
  std::optional<std::string> reference_spec;  // uniform | product | matrix:<path>
  std::vector<double> sweep_epsilons;         // --sweep
  bool include_plan = true;                   // cleared by --no-plan
  std::uint64_t seed = 42;                    // --seed, for verify's random instance
};

/// Runs one command: JSON report on out, diagnostics on err.
/// Exit codes: 0 success, 1 input error, 2 not converged or a verification
/// check failed, 3 infeasible.
int run_request(const CliRequest& request, std::ostream& out, std::ostream& err);

}  // namespace fpdot

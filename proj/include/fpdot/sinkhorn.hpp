#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "fpdot/divergence.hpp"
#include "fpdot/ideal_design.hpp"

namespace fpdot {

struct SolverConfig {
  double epsilon = 1.0;      // regularization constant carried to kernel builders
  int max_iterations = 10000;
  double tolerance = 1e-9;   // L1 residual of column marginals
  int check_interval = 10;   // residual evaluated every this many iterations
};

/// Result of one scaling solve. When converged is false the report still
/// carries the last iterate; callers decide whether partial output is usable.
struct SolveReport {
  TransportPlan plan;
  std::vector<double> log_u;  // log row scalings, -inf on zero-mass rows
  std::vector<double> log_v;  // log column scalings, -inf on zero-mass columns
  int iterations;
  bool converged;
  double final_residual;
  ObjectiveDecomposition objective;
};

/// Scales the ideal-design kernel to the prescribed marginals by alternating
/// log-domain updates. Convergence is declared on the L1 distance of column
/// sums to nu, measured right after a row update (row sums are then exact).
SolveReport solve(const DiscreteDensity& mu, const DiscreteDensity& nu,
                  const IdealDesign& ideal, const SolverConfig& config,
                  const std::optional<std::vector<double>>& initial_log_v = std::nullopt);

struct TwoRouteReport {
  SolveReport normalized_route;    // scales the normalized ideal-design kernel
  SolveReport unnormalized_route;  // scales exp(-c/eps) * phi directly
  double max_plan_difference;
};

/// Solves the same problem through the normalized and unnormalized kernels.
/// The two plans coincide because the normalizing constant is absorbed by
/// the scaling vectors; the reported difference quantifies that.
TwoRouteReport solve_two_routes(const DiscreteDensity& mu, const DiscreteDensity& nu,
                                const CostMatrix& cost, double epsilon,
                                const ReferenceDensity& phi, const SolverConfig& config);

/// Solves once per epsilon, warm-starting each solve from the previous
/// potentials rescaled by eps_prev / eps_next. Reports are returned in input
/// order as (epsilon, report) pairs.
std::vector<std::pair<double, SolveReport>> epsilon_sweep(
    const DiscreteDensity& mu, const DiscreteDensity& nu, const CostMatrix& cost,
    const ReferenceDensity& phi, const std::vector<double>& epsilons,
    const SolverConfig& config);

namespace detail {
/// Throws InfeasibleSupport when some mass-carrying row (or column) has no
/// admissible kernel entry in a mass-carrying column (or row).
void check_support_feasibility(const DiscreteDensity& mu, const DiscreteDensity& nu,
                               const Matrix& log_kernel);

/// Core iteration on an arbitrary log kernel (not necessarily normalized).
/// The returned report has a zeroed objective; callers decompose it against
/// the cost and reference they used to build the kernel.
SolveReport scale_log_kernel(const DiscreteDensity& mu, const DiscreteDensity& nu,
                             const Matrix& log_kernel, const SolverConfig& config,
                             const std::optional<std::vector<double>>& initial_log_v);
}  // namespace detail

}  // namespace fpdot

#pragma once

#include <vector>

#include "fpdot/densities.hpp"

namespace fpdot {

/// A basic optimal solution of the transportation LP. The plan is a vertex
/// of the transportation polytope: at most n + m - 1 strictly positive
/// entries. Dual variables are kept so callers can re-check the optimality
/// certificate (reduced costs of nonbasic cells are nonnegative).
struct LpSolution {
  TransportPlan plan;
  double optimal_cost;
  int basis_size;
  bool degenerate;  // some basic variable sits at zero
  std::vector<double> row_duals;
  std::vector<double> col_duals;
  int pivots;  // simplex pivots performed after the northwest-corner start
};

/// Transportation simplex: northwest-corner start, u-v (MODI) pricing,
/// Bland's rule (lexicographically first improving cell, lexicographic
/// leaving ties) so degenerate instances cannot cycle.
/// Guarded to n*m <= 1e6 cells.
LpSolution solve_exact(const DiscreteDensity& mu, const DiscreteDensity& nu,
                       const CostMatrix& cost);

/// Independent minimizer of the regularized objective for 2x2 problems,
/// where the marginal polytope is the segment t in [max(0, mu0+nu0-1),
/// min(mu0, nu0)] parameterizing plan [[t, mu0-t], [nu0-t, 1-mu0-nu0+t]].
/// Scans a grid of grid_resolution points then refines by golden section.
TransportPlan brute_force_regularized(const DiscreteDensity& mu,
                                      const DiscreteDensity& nu, const CostMatrix& cost,
                                      double epsilon, const ReferenceDensity& phi,
                                      int grid_resolution);

}  // namespace fpdot

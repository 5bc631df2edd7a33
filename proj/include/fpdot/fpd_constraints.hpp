#pragma once

#include "fpdot/densities.hpp"
#include "fpdot/ideal_design.hpp"
#include "fpdot/matrix.hpp"
#include "fpdot/sinkhorn.hpp"

namespace fpdot {

/// An inequality restricting plans beyond marginal matching:
/// sum_ij chi_ij pi_ij <= eta, with chi >= 0 entrywise and eta >= 0.
class MomentConstraint {
 public:
  MomentConstraint(Matrix chi, double eta);

  const Matrix& chi() const { return chi_; }
  double eta() const { return eta_; }

  /// The moment sum_ij chi_ij pi_ij of a plan (Kahan-summed).
  double evaluate(const TransportPlan& plan) const;

 private:
  Matrix chi_;
  double eta_;
};

/// Outcome of the constrained projection. The returned plan always satisfies
/// the moment bound (up to the final root-finder's bracket width); when
/// converged is false the leftover error sits in the marginals, whose
/// residuals are stored on the plan.
struct ConstrainedSolveReport {
  TransportPlan plan;
  double moment_value;      // sum chi * plan at the returned iterate
  bool constraint_active;   // the half-space multiplier was positive at the end
  int dykstra_iterations;   // full row/column/half-space cycles run
  bool converged;
};

/// KL projection of the ideal design onto the intersection of the marginal
/// polytope with the moment half-space, by Dykstra's alternating Bregman
/// projections (row block, column block, half-space block, with correction
/// variables). Throws EmptyFeasibleSet when even the minimum achievable
/// moment exceeds eta.
ConstrainedSolveReport solve_with_moment(const DiscreteDensity& mu,
                                         const DiscreteDensity& nu,
                                         const IdealDesign& ideal,
                                         const MomentConstraint& constraint,
                                         const SolverConfig& config);

/// Minimum of sum chi * pi over all plans with the given marginals, via the
/// exact transportation LP with chi as the cost.
double min_moment_value(const DiscreteDensity& mu, const DiscreteDensity& nu,
                        const Matrix& chi);

}  // namespace fpdot

#pragma once

#include "fpdot/densities.hpp"
#include "fpdot/matrix.hpp"

namespace fpdot {

/// KL divergence value together with the absolute-continuity predicate.
/// value is +inf exactly when absolutely_continuous is false; callers are
/// expected to branch on the flag before using value in arithmetic.
struct KlResult {
  double value;
  bool absolutely_continuous;
};

/// KL(p || q) = sum p_ij log(p_ij / q_ij) in nats, with 0 log 0 = 0.
/// Both inputs must carry total mass 1 within 1e-8.
KlResult kl_divergence(const Matrix& p, const Matrix& q);

struct ObjectiveDecomposition {
  double transport_cost;  // sum c_ij pi_ij
  double kl_term;         // KL(plan || phi)
  double total;           // transport_cost + epsilon * kl_term
};

/// Decomposes the regularized transport objective at the given plan.
/// Throws Infeasible when the plan is not absolutely continuous w.r.t. phi.
ObjectiveDecomposition regularized_objective(const TransportPlan& plan,
                                             const CostMatrix& cost, double epsilon,
                                             const ReferenceDensity& phi);

}  // namespace fpdot

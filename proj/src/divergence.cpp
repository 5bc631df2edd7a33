#include "fpdot/divergence.hpp"

#include <cmath>
#include <vector>

namespace fpdot {

KlResult kl_divergence(const Matrix& p, const Matrix& q) {
  if (!p.same_shape(q)) {
    throw DimensionMismatch("kl_divergence: p is " + std::to_string(p.rows()) + "x" +
                            std::to_string(p.cols()) + ", q is " +
                            std::to_string(q.rows()) + "x" + std::to_string(q.cols()));
  }
  double p_mass = p.total();
  double q_mass = q.total();
  if (std::abs(p_mass - 1.0) > 1e-8) {
    throw NotADensity("kl_divergence: p has mass " + std::to_string(p_mass));
  }
  if (std::abs(q_mass - 1.0) > 1e-8) {
    throw NotADensity("kl_divergence: q has mass " + std::to_string(q_mass));
  }

  std::vector<double> terms;
  terms.reserve(p.size());
  for (std::size_t k = 0; k < p.size(); ++k) {
    double pk = p.flat()[k];
    double qk = q.flat()[k];
    if (pk == 0.0) continue;  // 0 log 0 = 0 regardless of qk
    if (qk == 0.0) return {kPosInf, false};
    terms.push_back(pk * std::log(pk / qk));
  }
  double value = kahan_sum(terms);
  // Inputs are mass-checked to 1e-8; the true divergence is then bounded
  // below by -2e-8, so any small negative is rounding dust.
  if (value < 0.0 && value > -1e-7) value = 0.0;
  return {value, true};
}

ObjectiveDecomposition regularized_objective(const TransportPlan& plan,
                                             const CostMatrix& cost, double epsilon,
                                             const ReferenceDensity& phi) {
  if (epsilon <= 0.0) {
    throw EpsilonNotPositive("regularized_objective: epsilon = " +
                             std::to_string(epsilon));
  }
  if (!plan.entries().same_shape(cost.entries())) {
    throw DimensionMismatch("regularized_objective: plan is " +
                            std::to_string(plan.rows()) + "x" + std::to_string(plan.cols()) +
                            ", cost is " + std::to_string(cost.rows()) + "x" +
                            std::to_string(cost.cols()));
  }
  Matrix phi_m = phi.materialize(plan.rows(), plan.cols());

  std::vector<double> terms(plan.entries().size());
  for (std::size_t k = 0; k < terms.size(); ++k)
    terms[k] = cost.entries().flat()[k] * plan.entries().flat()[k];
  double transport_cost = kahan_sum(terms);

  KlResult kl = kl_divergence(plan.entries(), phi_m);
  if (!kl.absolutely_continuous) {
    throw Infeasible("plan places mass outside the support of the reference density");
  }
  return {transport_cost, kl.value, transport_cost + epsilon * kl.value};
}

}  // namespace fpdot

#include "fpdot/ideal_design.hpp"

#include <cmath>
#include <vector>

namespace fpdot {

Matrix IdealDesign::kernel() const {
  Matrix out(rows(), cols());
  for (std::size_t k = 0; k < log_kernel_.size(); ++k)
    out.flat()[k] = std::exp(log_kernel_.flat()[k]);
  return out;
}

IdealDesign build_ideal_design(const CostMatrix& cost, double epsilon,
                               const ReferenceDensity& phi) {
  if (epsilon <= 0.0 || std::isnan(epsilon)) {
    throw EpsilonNotPositive("ideal design: epsilon = " + std::to_string(epsilon));
  }
  const std::size_t n = cost.rows(), m = cost.cols();
  Matrix phi_m = phi.materialize(n, m);

  Matrix log_kernel(n, m, kNegInf);
  std::vector<double> support_terms;
  support_terms.reserve(n * m);
  for (std::size_t k = 0; k < phi_m.size(); ++k) {
    if (phi_m.flat()[k] > 0.0) {
      double t = -cost.entries().flat()[k] / epsilon + std::log(phi_m.flat()[k]);
      log_kernel.flat()[k] = t;
      support_terms.push_back(t);
    }
  }
  if (support_terms.empty()) {
    throw DegenerateReference("reference density is zero everywhere");
  }
  double log_normalizer = logsumexp(support_terms);
  for (double& v : log_kernel.flat()) {
    if (v != kNegInf) v -= log_normalizer;
  }
  return IdealDesign(std::move(log_kernel), log_normalizer, epsilon, phi,
                     cost);
}

IdealDesign boltzmann_ideal(const CostMatrix& cost, double epsilon) {
  return build_ideal_design(cost, epsilon, ReferenceDensity::uniform());
}

}  // namespace fpdot

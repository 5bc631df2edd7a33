#pragma once

#include "fpdot/densities.hpp"
#include "fpdot/matrix.hpp"

namespace fpdot {

/// The ideal design: the normalized kernel exp(-c/eps) * phi / N, kept in
/// log domain. Cells where phi vanishes carry -inf and are excluded from the
/// normalizer, so the support of the kernel equals the support of phi.
class IdealDesign {
 public:
  IdealDesign(Matrix log_kernel, double log_normalizer, double epsilon,
              ReferenceDensity phi, CostMatrix cost)
      : log_kernel_(std::move(log_kernel)),
        log_normalizer_(log_normalizer),
        epsilon_(epsilon),
        phi_(std::move(phi)),
        cost_(std::move(cost)) {}

  const Matrix& log_kernel() const { return log_kernel_; }
  /// log of the normalizing constant sum exp(-c/eps) * phi.
  double log_normalizer() const { return log_normalizer_; }
  double epsilon() const { return epsilon_; }
  const ReferenceDensity& reference() const { return phi_; }
  const CostMatrix& cost() const { return cost_; }

  std::size_t rows() const { return log_kernel_.rows(); }
  std::size_t cols() const { return log_kernel_.cols(); }

  /// Dense probabilities exp(log_kernel); sums to 1.
  Matrix kernel() const;

 private:
  Matrix log_kernel_;
  double log_normalizer_;
  double epsilon_;
  ReferenceDensity phi_;
  CostMatrix cost_;
};

/// Builds the normalized kernel exp(-c/eps) * phi / N via max-shifted
/// log-sum-exp. Direct exp(-c/eps) underflows already at c/eps around 745,
/// so everything stays in log domain.
IdealDesign build_ideal_design(const CostMatrix& cost, double epsilon,
                               const ReferenceDensity& phi);

/// Uniform-reference specialization: exp(-c/eps) / N.
IdealDesign boltzmann_ideal(const CostMatrix& cost, double epsilon);

}  // namespace fpdot

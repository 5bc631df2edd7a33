#include "fpdot/densities.hpp"

#include <cmath>
#include <cstdio>

namespace fpdot {

namespace {

// Inputs already normalized to this precision are kept bit-identical, which
// makes construction idempotent; renormalizing them again would perturb the
// last ulp.
constexpr double kAlreadyNormalizedEps = 1e-12;
constexpr double kRenormalizationBand = 1e-6;

void check_entries(std::span<const double> xs, const char* what) {
  for (std::size_t k = 0; k < xs.size(); ++k) {
    if (std::isnan(xs[k]) || std::isinf(xs[k])) {
      throw NonFiniteEntry(std::string(what) + " entry " + std::to_string(k) +
                           " is not finite");
    }
    if (xs[k] < 0.0) {
      throw NegativeWeight(std::string(what) + " entry " + std::to_string(k) +
                           " is negative (" + std::to_string(xs[k]) + ")");
    }
  }
}

// Shared by densities and explicit reference matrices.
void normalize_mass(std::span<double> xs, const char* what) {
  check_entries(xs, what);
  double sum = kahan_sum(xs);
  if (sum <= 0.0) {
    throw NotNormalizable(std::string(what) + " has nonpositive total mass " +
                          std::to_string(sum));
  }
  double off = std::abs(sum - 1.0);
  if (off <= kAlreadyNormalizedEps) return;
  if (off <= kRenormalizationBand) {
    for (double& x : xs) x /= sum;
    return;
  }
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", sum);
  throw NotNormalized(std::string(what) + " mass " + buf +
                      " is outside the 1e-6 renormalization band");
}

}  // namespace

DiscreteDensity::DiscreteDensity(std::vector<double> weights,
                                 std::vector<std::string> labels)
    : weights_(std::move(weights)), labels_(std::move(labels)) {
  if (weights_.empty()) throw NotNormalizable("density needs at least one weight");
  if (!labels_.empty() && labels_.size() != weights_.size()) {
    throw DimensionMismatch("label count " + std::to_string(labels_.size()) +
                            " does not match weight count " +
                            std::to_string(weights_.size()));
  }
  normalize_mass(weights_, "density");
}

DiscreteDensity make_density(std::vector<double> weights) {
  return DiscreteDensity(std::move(weights));
}

CostMatrix::CostMatrix(Matrix entries) : entries_(std::move(entries)) {
  if (entries_.size() == 0) throw DimensionMismatch("cost matrix is empty");
  check_entries(entries_.flat(), "cost");
}

TransportPlan::TransportPlan(Matrix entries) : entries_(std::move(entries)) {
  if (entries_.size() == 0) throw DimensionMismatch("transport plan is empty");
  check_entries(entries_.flat(), "plan");
  double total = entries_.total();
  if (std::abs(total - 1.0) > 1e-8) {
    throw NotADensity("plan total mass " + std::to_string(total) +
                      " is not 1 within 1e-8");
  }
}

TransportPlan::TransportPlan(Matrix entries, const DiscreteDensity& mu,
                             const DiscreteDensity& nu)
    : TransportPlan(std::move(entries)) {
  if (mu.size() != entries_.rows() || nu.size() != entries_.cols()) {
    throw DimensionMismatch("marginal sizes (" + std::to_string(mu.size()) + ", " +
                            std::to_string(nu.size()) + ") do not match plan shape (" +
                            std::to_string(entries_.rows()) + ", " +
                            std::to_string(entries_.cols()) + ")");
  }
  auto rows = entries_.row_sums();
  auto cols = entries_.col_sums();
  double row_err = 0.0, col_err = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) row_err += std::abs(rows[i] - mu[i]);
  for (std::size_t j = 0; j < cols.size(); ++j) col_err += std::abs(cols[j] - nu[j]);
  row_marginal_error_ = row_err;
  col_marginal_error_ = col_err;
}

std::pair<std::vector<double>, std::vector<double>> plan_marginals(
    const TransportPlan& plan) {
  return {plan.entries().row_sums(), plan.entries().col_sums()};
}

MembershipReport validate_membership(const TransportPlan& plan,
                                     const DiscreteDensity& mu,
                                     const DiscreteDensity& nu, double tol) {
  if (mu.size() != plan.rows() || nu.size() != plan.cols()) {
    throw DimensionMismatch("membership check: marginal sizes (" +
                            std::to_string(mu.size()) + ", " + std::to_string(nu.size()) +
                            ") vs plan shape (" + std::to_string(plan.rows()) + ", " +
                            std::to_string(plan.cols()) + ")");
  }
  auto [rows, cols] = plan_marginals(plan);
  double row_err = 0.0, col_err = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) row_err += std::abs(rows[i] - mu[i]);
  for (std::size_t j = 0; j < cols.size(); ++j) col_err += std::abs(cols[j] - nu[j]);
  return {row_err <= tol && col_err <= tol, row_err, col_err};
}

ReferenceDensity ReferenceDensity::uniform() {
  ReferenceDensity r;
  r.kind_ = ReferenceKind::kUniform;
  return r;
}

ReferenceDensity ReferenceDensity::product_of_marginals(DiscreteDensity mu,
                                                        DiscreteDensity nu) {
  ReferenceDensity r;
  r.kind_ = ReferenceKind::kProductOfMarginals;
  r.mu_ = std::move(mu);
  r.nu_ = std::move(nu);
  return r;
}

ReferenceDensity ReferenceDensity::explicit_matrix(Matrix phi) {
  if (phi.size() == 0) throw DimensionMismatch("reference matrix is empty");
  normalize_mass(phi.flat(), "reference");
  ReferenceDensity r;
  r.kind_ = ReferenceKind::kExplicitMatrix;
  r.matrix_ = std::move(phi);
  return r;
}

Matrix ReferenceDensity::materialize(std::size_t n, std::size_t m) const {
  if (n == 0 || m == 0) throw DimensionMismatch("reference dimensions must be positive");
  switch (kind_) {
    case ReferenceKind::kUniform: {
      return Matrix(n, m, 1.0 / static_cast<double>(n * m));
    }
    case ReferenceKind::kProductOfMarginals: {
      if (mu_->size() != n || nu_->size() != m) {
        throw DimensionMismatch("product reference is bound to (" +
                                std::to_string(mu_->size()) + ", " +
                                std::to_string(nu_->size()) + "), requested (" +
                                std::to_string(n) + ", " + std::to_string(m) + ")");
      }
      Matrix out(n, m);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j) out(i, j) = (*mu_)[i] * (*nu_)[j];
      return out;
    }
    case ReferenceKind::kExplicitMatrix: {
      if (matrix_->rows() != n || matrix_->cols() != m) {
        throw DimensionMismatch("explicit reference is " +
                                std::to_string(matrix_->rows()) + "x" +
                                std::to_string(matrix_->cols()) + ", requested " +
                                std::to_string(n) + "x" + std::to_string(m));
      }
      return *matrix_;
    }
  }
  throw Error("unreachable reference kind");
}

ReferenceDensity ReferenceDensity::transposed() const {
  switch (kind_) {
    case ReferenceKind::kUniform:
      return uniform();
    case ReferenceKind::kProductOfMarginals:
      return product_of_marginals(*nu_, *mu_);
    case ReferenceKind::kExplicitMatrix:
      return explicit_matrix(matrix_->transposed());
  }
  throw Error("unreachable reference kind");
}

}  // namespace fpdot

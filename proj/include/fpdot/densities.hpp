#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fpdot/matrix.hpp"

namespace fpdot {

/// A validated pmf on a finite support. Immutable after construction.
///
/// Inputs whose mass is within 1e-6 of 1 are silently renormalized (file
/// rounding); anything further off is rejected so user mistakes stay visible.
/// Zero weights are legal and retained: they mark support points that carry
/// no mass but keep index correspondence with labels.
class DiscreteDensity {
 public:
  explicit DiscreteDensity(std::vector<double> weights,
                           std::vector<std::string> labels = {});

  std::size_t size() const { return weights_.size(); }
  double operator[](std::size_t i) const { return weights_[i]; }
  const std::vector<double>& weights() const { return weights_; }
  const std::vector<std::string>& labels() const { return labels_; }

 private:
  std::vector<double> weights_;
  std::vector<std::string> labels_;
};

/// Same validation as the DiscreteDensity constructor; kept as a free
/// function for call sites that read better with a verb.
DiscreteDensity make_density(std::vector<double> weights);

/// Nonnegative finite transport costs c(x, y) on the product support.
class CostMatrix {
 public:
  explicit CostMatrix(Matrix entries);

  const Matrix& entries() const { return entries_; }
  std::size_t rows() const { return entries_.rows(); }
  std::size_t cols() const { return entries_.cols(); }
  double operator()(std::size_t i, std::size_t j) const { return entries_(i, j); }

 private:
  Matrix entries_;
};

/// A joint pmf over the product support, with optional marginal-error
/// diagnostics filled in by whoever produced it.
class TransportPlan {
 public:
  explicit TransportPlan(Matrix entries);
  TransportPlan(Matrix entries, const DiscreteDensity& mu, const DiscreteDensity& nu);

  const Matrix& entries() const { return entries_; }
  std::size_t rows() const { return entries_.rows(); }
  std::size_t cols() const { return entries_.cols(); }
  double operator()(std::size_t i, std::size_t j) const { return entries_(i, j); }

  /// L1 distance of row sums to the target mu (0 when not measured).
  double row_marginal_error() const { return row_marginal_error_; }
  /// L1 distance of column sums to the target nu (0 when not measured).
  double col_marginal_error() const { return col_marginal_error_; }

 private:
  Matrix entries_;
  double row_marginal_error_ = 0.0;
  double col_marginal_error_ = 0.0;
};

/// Row sums and column sums of the plan, in that order.
std::pair<std::vector<double>, std::vector<double>> plan_marginals(
    const TransportPlan& plan);

struct MembershipReport {
  bool within_tolerance;
  double row_error;  // L1(row sums, mu)
  double col_error;  // L1(col sums, nu)
};

/// Checks membership of the plan in the marginal polytope at tolerance tol.
MembershipReport validate_membership(const TransportPlan& plan,
                                     const DiscreteDensity& mu,
                                     const DiscreteDensity& nu, double tol);

enum class ReferenceKind { kUniform, kProductOfMarginals, kExplicitMatrix };

/// The reference density phi of the regularized objective. Uniform and
/// product kinds materialize lazily once the problem dimensions are known;
/// the product kind carries the marginals it was bound to.
class ReferenceDensity {
 public:
  static ReferenceDensity uniform();
  static ReferenceDensity product_of_marginals(DiscreteDensity mu, DiscreteDensity nu);
  static ReferenceDensity explicit_matrix(Matrix phi);

  ReferenceKind kind() const { return kind_; }

  /// Dense n-by-m realization; throws DimensionMismatch when the kind is
  /// bound to incompatible dimensions.
  Matrix materialize(std::size_t n, std::size_t m) const;

  ReferenceDensity transposed() const;

 private:
  ReferenceDensity() = default;

  ReferenceKind kind_ = ReferenceKind::kUniform;
  std::optional<DiscreteDensity> mu_, nu_;  // product kind
  std::optional<Matrix> matrix_;            // explicit kind
};

}  // namespace fpdot

#include "fpdot/fpd_constraints.hpp"

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "fpdot/exact_lp.hpp"
#include "fpdot/numeric.hpp"

namespace fpdot {

MomentConstraint::MomentConstraint(Matrix chi, double eta)
    : chi_(std::move(chi)), eta_(eta) {
  if (chi_.size() == 0) throw DimensionMismatch("moment matrix is empty");
  const auto flat = chi_.flat();
  for (std::size_t k = 0; k < flat.size(); ++k) {
    if (!std::isfinite(flat[k])) {
      throw NonFiniteEntry("moment entry " + std::to_string(k) + " is not finite");
    }
    if (flat[k] < 0.0) {
      throw NegativeWeight("moment entry " + std::to_string(k) + " is negative (" +
                           std::to_string(flat[k]) + ")");
    }
  }
  if (!(eta_ >= 0.0)) {
    throw InvalidArgument("moment bound must be nonnegative, got " +
                          std::to_string(eta_));
  }
}

double MomentConstraint::evaluate(const TransportPlan& plan) const {
  if (plan.rows() != chi_.rows() || plan.cols() != chi_.cols()) {
    throw DimensionMismatch("moment matrix is " + std::to_string(chi_.rows()) + "x" +
                            std::to_string(chi_.cols()) + ", plan is " +
                            std::to_string(plan.rows()) + "x" +
                            std::to_string(plan.cols()));
  }
  std::vector<double> terms(chi_.size());
  for (std::size_t k = 0; k < terms.size(); ++k) {
    terms[k] = chi_.flat()[k] * plan.entries().flat()[k];
  }
  return kahan_sum(terms);
}

double min_moment_value(const DiscreteDensity& mu, const DiscreteDensity& nu,
                        const Matrix& chi) {
  return solve_exact(mu, nu, CostMatrix(chi)).optimal_cost;
}

namespace {

// Moment of the tilted point y * exp(-lambda * chi), without materializing it.
double tilted_moment(const Matrix& log_y, const Matrix& chi, double lambda) {
  std::vector<double> terms;
  terms.reserve(log_y.size());
  for (std::size_t k = 0; k < log_y.size(); ++k) {
    double c = chi.flat()[k];
    double ly = log_y.flat()[k];
    if (c <= 0.0 || ly == kNegInf) continue;
    terms.push_back(c * std::exp(ly - lambda * c));
  }
  return kahan_sum(terms);
}

// KL projection onto {pi : sum chi*pi <= eta} maps y to y * exp(-lambda* chi)
// with lambda* = 0 when y already satisfies the bound, otherwise the root of
// the (monotone decreasing) tilted moment. Bracket by doubling, then bisect;
// the feasible end of the bracket is returned so the bound holds on exit.
double halfspace_multiplier(const Matrix& log_y, const Matrix& chi, double eta) {
  if (tilted_moment(log_y, chi, 0.0) <= eta) return 0.0;
  double hi = 1.0;
  for (int d = 0; d < 600 && tilted_moment(log_y, chi, hi) > eta; ++d) hi *= 2.0;
  double lo = 0.0;
  for (int step = 0; step < 100; ++step) {
    double mid = 0.5 * (lo + hi);
    if (tilted_moment(log_y, chi, mid) > eta) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return hi;
}

double l1_distance(const std::vector<double>& a, const DiscreteDensity& b) {
  double out = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) out += std::abs(a[i] - b[i]);
  return out;
}

// Moment-to-mass ratio of the tilted plan p * exp(-lambda chi); monotone
// decreasing in lambda.
double tilted_ratio(const Matrix& p, const Matrix& chi, double lambda) {
  std::vector<double> mass(p.size()), moment(p.size());
  for (std::size_t k = 0; k < p.size(); ++k) {
    mass[k] = p.flat()[k] * std::exp(-lambda * chi.flat()[k]);
    moment[k] = mass[k] * chi.flat()[k];
  }
  double total = kahan_sum(mass);
  if (total <= 0.0) return 0.0;
  return kahan_sum(moment) / total;
}

// Renormalizing a mass-deficient iterate can lift its moment back above eta.
// One tilt targeted at the normalized ratio restores the bound exactly; any
// leftover error stays in the marginals, where it is reported. No-op when
// the bound already holds or no tilt can reach it.
void enforce_bound(Matrix& entries, const Matrix& chi, double eta) {
  if (tilted_ratio(entries, chi, 0.0) <= eta) return;
  double hi = 1.0;
  for (int d = 0; d < 600 && tilted_ratio(entries, chi, hi) > eta; ++d) hi *= 2.0;
  if (tilted_ratio(entries, chi, hi) > eta) return;
  double lo = 0.0;
  for (int step = 0; step < 200; ++step) {
    double mid = 0.5 * (lo + hi);
    if (tilted_ratio(entries, chi, mid) > eta) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  for (std::size_t k = 0; k < entries.size(); ++k) {
    entries.flat()[k] *= std::exp(-hi * chi.flat()[k]);
  }
  double total = entries.total();
  if (total > 0.0) {
    for (double& e : entries.flat()) e /= total;
  }
}

}  // namespace

ConstrainedSolveReport solve_with_moment(const DiscreteDensity& mu,
                                         const DiscreteDensity& nu,
                                         const IdealDesign& ideal,
                                         const MomentConstraint& constraint,
                                         const SolverConfig& config) {
  const Matrix& log_kernel = ideal.log_kernel();
  const std::size_t n = log_kernel.rows(), m = log_kernel.cols();
  if (mu.size() != n || nu.size() != m) {
    throw DimensionMismatch("solve_with_moment: marginals are (" +
                            std::to_string(mu.size()) + ", " +
                            std::to_string(nu.size()) + "), kernel is " +
                            std::to_string(n) + "x" + std::to_string(m));
  }
  if (constraint.chi().rows() != n || constraint.chi().cols() != m) {
    throw DimensionMismatch("solve_with_moment: moment matrix is " +
                            std::to_string(constraint.chi().rows()) + "x" +
                            std::to_string(constraint.chi().cols()) + ", kernel is " +
                            std::to_string(n) + "x" + std::to_string(m));
  }
  if (config.max_iterations < 1) throw InvalidArgument("max_iterations must be >= 1");
  if (config.tolerance <= 0.0) throw InvalidArgument("tolerance must be positive");
  detail::check_support_feasibility(mu, nu, log_kernel);

  const Matrix& chi = constraint.chi();
  const double eta = constraint.eta();
  double floor = min_moment_value(mu, nu, chi);
  if (floor > eta) {
    throw EmptyFeasibleSet("minimum achievable moment " + std::to_string(floor) +
                           " exceeds the bound " + std::to_string(eta));
  }

  // Start at the ideal design with zero-mass rows and columns masked off.
  Matrix log_pi = log_kernel;
  for (std::size_t i = 0; i < n; ++i) {
    if (mu[i] > 0.0) continue;
    for (std::size_t j = 0; j < m; ++j) log_pi(i, j) = kNegInf;
  }
  for (std::size_t j = 0; j < m; ++j) {
    if (nu[j] > 0.0) continue;
    for (std::size_t i = 0; i < n; ++i) log_pi(i, j) = kNegInf;
  }

  std::vector<double> log_mu(n), log_nu(m);
  for (std::size_t i = 0; i < n; ++i) log_mu[i] = std::log(mu[i]);  // -inf at 0
  for (std::size_t j = 0; j < m; ++j) log_nu[j] = std::log(nu[j]);

  // Dykstra corrections: per-row and per-column log factors for the two
  // marginal blocks, lambda * chi for the half-space block.
  std::vector<double> q_row(n, 0.0), q_col(m, 0.0);
  double lambda = 0.0;

  Matrix log_y(n, m);
  std::vector<double> row_buf(m), col_buf(n);
  bool converged = false;
  int cycles = 0;

  for (int cycle = 1; cycle <= config.max_iterations; ++cycle) {
    cycles = cycle;

    // Row block: project y = pi * exp(q_row) onto {row sums = mu}. The
    // correction shifts out of the row logsumexp, so the iterate update
    // reduces to a per-row rescale.
    for (std::size_t i = 0; i < n; ++i) {
      if (mu[i] <= 0.0) {
        q_row[i] = 0.0;
        continue;
      }
      for (std::size_t j = 0; j < m; ++j) row_buf[j] = log_pi(i, j);
      double lse = logsumexp(row_buf);
      double shift = log_mu[i] - lse;
      for (std::size_t j = 0; j < m; ++j) {
        if (log_pi(i, j) != kNegInf) log_pi(i, j) += shift;
      }
      q_row[i] += lse - log_mu[i];
    }

    // Column block, transposed copy of the row block.
    for (std::size_t j = 0; j < m; ++j) {
      if (nu[j] <= 0.0) {
        q_col[j] = 0.0;
        continue;
      }
      for (std::size_t i = 0; i < n; ++i) col_buf[i] = log_pi(i, j);
      double lse = logsumexp(col_buf);
      double shift = log_nu[j] - lse;
      for (std::size_t i = 0; i < n; ++i) {
        if (log_pi(i, j) != kNegInf) log_pi(i, j) += shift;
      }
      q_col[j] += lse - log_nu[j];
    }

    // Half-space block: reinstate the old correction, project, store the
    // new multiplier as the correction.
    for (std::size_t k = 0; k < log_pi.size(); ++k) {
      double lp = log_pi.flat()[k];
      log_y.flat()[k] = (lp == kNegInf) ? kNegInf : lp + lambda * chi.flat()[k];
    }
    lambda = halfspace_multiplier(log_y, chi, eta);
    for (std::size_t k = 0; k < log_pi.size(); ++k) {
      double ly = log_y.flat()[k];
      log_pi.flat()[k] = (ly == kNegInf) ? kNegInf : ly - lambda * chi.flat()[k];
    }

    Matrix plan(n, m);
    for (std::size_t k = 0; k < plan.size(); ++k)
      plan.flat()[k] = std::exp(log_pi.flat()[k]);
    double row_err = l1_distance(plan.row_sums(), mu);
    double col_err = l1_distance(plan.col_sums(), nu);
    double moment = tilted_moment(log_pi, chi, 0.0);
    double moment_err = moment > eta ? moment - eta : 0.0;
    if (row_err <= config.tolerance && col_err <= config.tolerance &&
        moment_err <= config.tolerance) {
      converged = true;
      break;
    }
  }

  Matrix entries(n, m);
  for (std::size_t k = 0; k < entries.size(); ++k)
    entries.flat()[k] = std::exp(log_pi.flat()[k]);
  double total = entries.total();
  if (total > 0.0) {
    for (double& e : entries.flat()) e /= total;
  }
  enforce_bound(entries, chi, eta);
  TransportPlan plan(std::move(entries), mu, nu);
  double moment_value = constraint.evaluate(plan);
  return ConstrainedSolveReport{std::move(plan), moment_value, lambda > 0.0, cycles,
                                converged};
}

}  // namespace fpdot

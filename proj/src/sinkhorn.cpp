#include "fpdot/sinkhorn.hpp"

#include <cmath>
#include <string>

namespace fpdot {

namespace {

void check_problem_shape(const DiscreteDensity& mu, const DiscreteDensity& nu,
                         std::size_t n, std::size_t m, const char* where) {
  if (mu.size() != n || nu.size() != m) {
    throw DimensionMismatch(std::string(where) + ": marginals are (" +
                            std::to_string(mu.size()) + ", " + std::to_string(nu.size()) +
                            "), kernel is " + std::to_string(n) + "x" +
                            std::to_string(m));
  }
}

}  // namespace

namespace detail {

// Every mass-carrying row needs at least one admissible cell in a
// mass-carrying column, otherwise no plan dominated by the kernel can meet
// the marginals. Same check transposed.
void check_support_feasibility(const DiscreteDensity& mu, const DiscreteDensity& nu,
                               const Matrix& log_kernel) {
  const std::size_t n = log_kernel.rows(), m = log_kernel.cols();
  for (std::size_t i = 0; i < n; ++i) {
    if (mu[i] <= 0.0) continue;
    bool admissible = false;
    for (std::size_t j = 0; j < m && !admissible; ++j)
      admissible = nu[j] > 0.0 && log_kernel(i, j) != kNegInf;
    if (!admissible) {
      throw InfeasibleSupport("row " + std::to_string(i) +
                              " carries mass but has no admissible kernel entry");
    }
  }
  for (std::size_t j = 0; j < m; ++j) {
    if (nu[j] <= 0.0) continue;
    bool admissible = false;
    for (std::size_t i = 0; i < n && !admissible; ++i)
      admissible = mu[i] > 0.0 && log_kernel(i, j) != kNegInf;
    if (!admissible) {
      throw InfeasibleSupport("column " + std::to_string(j) +
                              " carries mass but has no admissible kernel entry");
    }
  }
}

}  // namespace detail

namespace {

double row_logsumexp(const Matrix& log_kernel, std::size_t i,
                     const std::vector<double>& log_v) {
  const std::size_t m = log_kernel.cols();
  double max_val = kNegInf;
  for (std::size_t j = 0; j < m; ++j) {
    double t = log_kernel(i, j) + log_v[j];
    if (t > max_val) max_val = t;
  }
  if (max_val == kNegInf) return kNegInf;
  double sum = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    double t = log_kernel(i, j) + log_v[j];
    if (t != kNegInf) sum += std::exp(t - max_val);
  }
  return max_val + std::log(sum);
}

double col_logsumexp(const Matrix& log_kernel, std::size_t j,
                     const std::vector<double>& log_u) {
  const std::size_t n = log_kernel.rows();
  double max_val = kNegInf;
  for (std::size_t i = 0; i < n; ++i) {
    double t = log_kernel(i, j) + log_u[i];
    if (t > max_val) max_val = t;
  }
  if (max_val == kNegInf) return kNegInf;
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double t = log_kernel(i, j) + log_u[i];
    if (t != kNegInf) sum += std::exp(t - max_val);
  }
  return max_val + std::log(sum);
}

Matrix assemble_plan(const Matrix& log_kernel, const std::vector<double>& log_u,
                     const std::vector<double>& log_v) {
  const std::size_t n = log_kernel.rows(), m = log_kernel.cols();
  Matrix plan(n, m);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      double t = log_u[i] + log_kernel(i, j) + log_v[j];
      plan(i, j) = (t == kNegInf) ? 0.0 : std::exp(t);
    }
  }
  return plan;
}

// L1 distance of the current plan's column sums to nu. Column sums of
// masked (zero-mass) columns are zero by construction and contribute zero.
double column_residual(const Matrix& log_kernel, const std::vector<double>& log_u,
                       const std::vector<double>& log_v, const DiscreteDensity& nu) {
  const std::size_t n = log_kernel.rows(), m = log_kernel.cols();
  double residual = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    double sum = 0.0;
    double carry = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double t = log_u[i] + log_kernel(i, j) + log_v[j];
      double x = (t == kNegInf) ? 0.0 : std::exp(t);
      double y = x - carry;
      double s = sum + y;
      carry = (s - sum) - y;
      sum = s;
    }
    residual += std::abs(sum - nu[j]);
  }
  return residual;
}

}  // namespace

namespace detail {

SolveReport scale_log_kernel(const DiscreteDensity& mu, const DiscreteDensity& nu,
                             const Matrix& log_kernel, const SolverConfig& config,
                             const std::optional<std::vector<double>>& initial_log_v) {
  const std::size_t n = log_kernel.rows(), m = log_kernel.cols();
  check_problem_shape(mu, nu, n, m, "solve");
  if (config.max_iterations < 1) throw InvalidArgument("max_iterations must be >= 1");
  if (config.tolerance <= 0.0) throw InvalidArgument("tolerance must be positive");
  if (config.check_interval < 1) throw InvalidArgument("check_interval must be >= 1");
  check_support_feasibility(mu, nu, log_kernel);

  std::vector<double> log_mu(n), log_nu(m);
  for (std::size_t i = 0; i < n; ++i) log_mu[i] = std::log(mu[i]);  // -inf at 0
  for (std::size_t j = 0; j < m; ++j) log_nu[j] = std::log(nu[j]);

  std::vector<double> log_v(m, 0.0);
  if (initial_log_v) {
    if (initial_log_v->size() != m) {
      throw DimensionMismatch("initial log_v has length " +
                              std::to_string(initial_log_v->size()) + ", expected " +
                              std::to_string(m));
    }
    log_v = *initial_log_v;
  }
  // Zero-mass columns are masked from the start so row updates never
  // allocate mass to them.
  for (std::size_t j = 0; j < m; ++j) {
    if (nu[j] <= 0.0) log_v[j] = kNegInf;
  }

  std::vector<double> log_u(n, kNegInf);
  bool converged = false;
  double residual = kPosInf;
  int iterations = 0;

  for (int iter = 1; iter <= config.max_iterations; ++iter) {
    iterations = iter;
    // Row update: rows of the implied plan now sum exactly to mu.
    for (std::size_t i = 0; i < n; ++i) {
      log_u[i] = (mu[i] <= 0.0) ? kNegInf : log_mu[i] - row_logsumexp(log_kernel, i, log_v);
    }
    if (iter % config.check_interval == 0 || iter == config.max_iterations) {
      residual = column_residual(log_kernel, log_u, log_v, nu);
      if (residual <= config.tolerance) {
        converged = true;
        break;
      }
    }
    for (std::size_t j = 0; j < m; ++j) {
      log_v[j] = (nu[j] <= 0.0) ? kNegInf : log_nu[j] - col_logsumexp(log_kernel, j, log_u);
    }
  }

  Matrix entries = assemble_plan(log_kernel, log_u, log_v);
  double total = entries.total();
  if (total > 0.0) {
    for (double& x : entries.flat()) x /= total;
  }
  TransportPlan plan(std::move(entries), mu, nu);
  return SolveReport{std::move(plan), std::move(log_u), std::move(log_v),
                     iterations, converged, residual,
                     ObjectiveDecomposition{}};
}

}  // namespace detail

SolveReport solve(const DiscreteDensity& mu, const DiscreteDensity& nu,
                  const IdealDesign& ideal, const SolverConfig& config,
                  const std::optional<std::vector<double>>& initial_log_v) {
  SolveReport report =
      detail::scale_log_kernel(mu, nu, ideal.log_kernel(), config, initial_log_v);
  report.objective = regularized_objective(report.plan, ideal.cost(), ideal.epsilon(),
                                           ideal.reference());
  return report;
}

TwoRouteReport solve_two_routes(const DiscreteDensity& mu, const DiscreteDensity& nu,
                                const CostMatrix& cost, double epsilon,
                                const ReferenceDensity& phi, const SolverConfig& config) {
  IdealDesign ideal = build_ideal_design(cost, epsilon, phi);
  SolveReport normalized = solve(mu, nu, ideal, config);

  // Unnormalized route: log(exp(-c/eps) * phi) with no normalizer subtracted.
  Matrix raw_log_kernel = ideal.log_kernel();
  for (double& v : raw_log_kernel.flat()) {
    if (v != kNegInf) v += ideal.log_normalizer();
  }
  SolveReport unnormalized =
      detail::scale_log_kernel(mu, nu, raw_log_kernel, config, std::nullopt);
  unnormalized.objective = regularized_objective(unnormalized.plan, cost, epsilon, phi);

  double diff = max_abs_difference(normalized.plan.entries(), unnormalized.plan.entries());
  return TwoRouteReport{std::move(normalized), std::move(unnormalized), diff};
}

std::vector<std::pair<double, SolveReport>> epsilon_sweep(
    const DiscreteDensity& mu, const DiscreteDensity& nu, const CostMatrix& cost,
    const ReferenceDensity& phi, const std::vector<double>& epsilons,
    const SolverConfig& config) {
  if (epsilons.empty()) throw InvalidArgument("epsilon sweep needs at least one value");
  std::vector<std::pair<double, SolveReport>> out;
  out.reserve(epsilons.size());
  std::optional<std::vector<double>> warm_log_v;
  double previous_epsilon = 0.0;
  for (double eps : epsilons) {
    IdealDesign ideal = build_ideal_design(cost, eps, phi);
    std::optional<std::vector<double>> init;
    if (warm_log_v) {
      // Potentials scale like dual variables divided by epsilon; continuing
      // a sweep rescales them by eps_prev / eps_next.
      init = *warm_log_v;
      double scale = previous_epsilon / eps;
      for (double& v : *init) {
        if (v != kNegInf) v *= scale;
      }
    }
    SolveReport report = solve(mu, nu, ideal, config, init);
    warm_log_v = report.log_v;
    previous_epsilon = eps;
    out.emplace_back(eps, std::move(report));
  }
  return out;
}

}  // namespace fpdot

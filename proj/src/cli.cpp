#include "fpdot/cli.hpp"

#include <algorithm>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "fpdot/divergence.hpp"
#include "fpdot/exact_lp.hpp"
#include "fpdot/fpd_constraints.hpp"
#include "fpdot/ideal_design.hpp"
#include "fpdot/instance.hpp"
#include "fpdot/random_instance.hpp"
#include "fpdot/report.hpp"
#include "fpdot/sinkhorn.hpp"

namespace fpdot {

namespace {

ProblemInstance load_problem(const CliRequest& request) {
  if (request.instance_path && request.cost_csv_path) {
    throw InvalidArgument("give either an instance file or --cost-csv, not both");
  }
  if (request.instance_path) return parse_instance(*request.instance_path);
  if (request.cost_csv_path) return instance_from_cost_csv(*request.cost_csv_path);
  if (request.command == "verify") {
    std::mt19937_64 rng(request.seed);
    RandomInstance random = make_random_instance(3, 3, rng);
    return ProblemInstance{std::move(random.mu),
                           std::move(random.nu),
                           std::move(random.cost),
                           std::nullopt,
                           ReferenceDensity::uniform(),
                           std::nullopt};
  }
  throw InvalidArgument(request.command + " needs an instance file or --cost-csv");
}

ReferenceDensity resolve_reference(const CliRequest& request,
                                   const ProblemInstance& instance) {
  if (!request.reference_spec) return instance.reference;
  const std::string& spec = *request.reference_spec;
  if (spec == "uniform") return ReferenceDensity::uniform();
  if (spec == "product") {
    return ReferenceDensity::product_of_marginals(instance.mu, instance.nu);
  }
  if (spec.rfind("matrix:", 0) == 0) {
    ReferenceDensity r = ReferenceDensity::explicit_matrix(
        load_matrix_file(spec.substr(7)));
    (void)r.materialize(instance.mu.size(), instance.nu.size());
    return r;
  }
  throw InvalidArgument("--reference must be uniform, product, or matrix:<path>");
}

double resolve_epsilon(const CliRequest& request, const ProblemInstance& instance) {
  if (request.epsilon) return *request.epsilon;
  if (instance.epsilon) return *instance.epsilon;
  if (request.command == "verify") return 0.5;
  throw InvalidArgument(request.command +
                        " needs --epsilon (or an \"epsilon\" field in the instance)");
}

SolverConfig make_config(const CliRequest& request, double epsilon) {
  SolverConfig config;
  config.epsilon = epsilon;
  config.max_iterations = request.max_iterations;
  config.tolerance = request.tolerance;
  return config;
}

double plan_residual(const TransportPlan& plan) {
  return std::max(plan.row_marginal_error(), plan.col_marginal_error());
}

int run_solve(const ProblemInstance& instance, const ReferenceDensity& phi,
              double epsilon, const CliRequest& request, std::ostream& out) {
  IdealDesign ideal = build_ideal_design(instance.cost, epsilon, phi);
  SolveReport report = solve(instance.mu, instance.nu, ideal,
                             make_config(request, epsilon));
  JsonObject o;
  o.field("command", "solve")
      .field("converged", report.converged)
      .field("iterations", report.iterations);
  if (request.include_plan) o.field("plan", report.plan.entries());
  o.field("transport_cost", report.objective.transport_cost)
      .field("kl_term", report.objective.kl_term)
      .field("total_objective", report.objective.total)
      .field("marginal_residual", plan_residual(report.plan))
      .field("dual_log_u", std::span<const double>(report.log_u))
      .field("dual_log_v", std::span<const double>(report.log_v));
  out << o.str() << "\n";
  return report.converged ? 0 : 2;
}

int run_exact(const ProblemInstance& instance, const CliRequest& request,
              std::ostream& out) {
  LpSolution solution = solve_exact(instance.mu, instance.nu, instance.cost);
  JsonObject o;
  o.field("command", "exact")
      .field("converged", true)
      .field("iterations", solution.pivots);
  if (request.include_plan) o.field("plan", solution.plan.entries());
  o.field("transport_cost", solution.optimal_cost)
      .field("marginal_residual", plan_residual(solution.plan));
  out << o.str() << "\n";
  return 0;
}

int run_sweep(const ProblemInstance& instance, const ReferenceDensity& phi,
              const CliRequest& request, std::ostream& out) {
  if (request.sweep_epsilons.empty()) {
    throw InvalidArgument("sweep needs --sweep with at least one epsilon");
  }
  auto runs = epsilon_sweep(instance.mu, instance.nu, instance.cost, phi,
                            request.sweep_epsilons,
                            make_config(request, request.sweep_epsilons.front()));
  bool all_converged = true;
  int total_iterations = 0;
  std::string results = "[";
  for (std::size_t k = 0; k < runs.size(); ++k) {
    const auto& [eps, report] = runs[k];
    all_converged = all_converged && report.converged;
    total_iterations += report.iterations;
    JsonObject entry;
    entry.field("epsilon", eps)
        .field("converged", report.converged)
        .field("iterations", report.iterations)
        .field("transport_cost", report.objective.transport_cost)
        .field("kl_term", report.objective.kl_term)
        .field("total_objective", report.objective.total)
        .field("marginal_residual", plan_residual(report.plan));
    if (k > 0) results += ',';
    results += entry.str();
  }
  results += ']';

  const SolveReport& last = runs.back().second;
  JsonObject o;
  o.field("command", "sweep")
      .field("converged", all_converged)
      .field("iterations", total_iterations);
  if (request.include_plan) o.field("plan", last.plan.entries());
  o.field("transport_cost", last.objective.transport_cost)
      .field("kl_term", last.objective.kl_term)
      .field("total_objective", last.objective.total)
      .field("marginal_residual", plan_residual(last.plan))
      .field_json("results", results);
  out << o.str() << "\n";
  return all_converged ? 0 : 2;
}

int run_constrained(const ProblemInstance& instance, const ReferenceDensity& phi,
                    double epsilon, const CliRequest& request, std::ostream& out) {
  if (!instance.moment) {
    throw InvalidArgument("constrained needs a \"moment\" field in the instance");
  }
  IdealDesign ideal = build_ideal_design(instance.cost, epsilon, phi);
  ConstrainedSolveReport report = solve_with_moment(
      instance.mu, instance.nu, ideal, *instance.moment, make_config(request, epsilon));
  ObjectiveDecomposition objective =
      regularized_objective(report.plan, instance.cost, epsilon, phi);
  JsonObject o;
  o.field("command", "constrained")
      .field("converged", report.converged)
      .field("iterations", report.dykstra_iterations);
  if (request.include_plan) o.field("plan", report.plan.entries());
  o.field("transport_cost", objective.transport_cost)
      .field("kl_term", objective.kl_term)
      .field("total_objective", objective.total)
      .field("marginal_residual", plan_residual(report.plan))
      .field("moment_value", report.moment_value)
      .field("constraint_active", report.constraint_active);
  out << o.str() << "\n";
  return report.converged ? 0 : 2;
}

int run_verify(const ProblemInstance& instance, const ReferenceDensity& phi,
               double epsilon, const CliRequest& request, std::ostream& out) {
  SolverConfig config = make_config(request, epsilon);
  const DiscreteDensity& mu = instance.mu;
  const DiscreteDensity& nu = instance.nu;

  IdealDesign ideal = build_ideal_design(instance.cost, epsilon, phi);
  SolveReport base = solve(mu, nu, ideal, config);

  TwoRouteReport two = solve_two_routes(mu, nu, instance.cost, epsilon, phi, config);
  bool two_ok = two.normalized_route.converged && two.unnormalized_route.converged &&
                two.max_plan_difference <= 1e-7;

  IdealDesign flat = build_ideal_design(
      instance.cost, 1e6, ReferenceDensity::product_of_marginals(mu, nu));
  SolveReport wide = solve(mu, nu, flat, config);
  Matrix outer(mu.size(), nu.size());
  for (std::size_t i = 0; i < mu.size(); ++i)
    for (std::size_t j = 0; j < nu.size(); ++j) outer(i, j) = mu[i] * nu[j];
  double wide_diff = max_abs_difference(wide.plan.entries(), outer);
  bool wide_ok = wide.converged && wide_diff <= 1e-5;

  LpSolution lp = solve_exact(mu, nu, instance.cost);
  double cost_scale = *std::max_element(instance.cost.entries().flat().begin(),
                                        instance.cost.entries().flat().end());
  if (cost_scale <= 0.0) cost_scale = 1.0;
  std::vector<double> grid;
  for (double g : {1.0, 0.3, 0.1, 0.03, 0.01}) grid.push_back(g * cost_scale);
  auto runs = epsilon_sweep(mu, nu, instance.cost, phi, grid, config);
  bool sweep_converged = true;
  for (const auto& [eps, report] : runs) {
    sweep_converged = sweep_converged && report.converged;
  }
  double sharp_cost = runs.back().second.objective.transport_cost;
  double slack = lp.optimal_cost < 0.01 ? 1e-4 : 0.01 * lp.optimal_cost;
  bool sharp_ok = sweep_converged && sharp_cost >= lp.optimal_cost - 1e-9 &&
                  sharp_cost - lp.optimal_cost <= slack;

  bool all_ok = base.converged && two_ok && wide_ok && sharp_ok;

  JsonObject check_two;
  check_two.field("name", "two_route_equivalence")
      .field("max_plan_difference", two.max_plan_difference)
      .field("pass", two_ok);
  JsonObject check_wide;
  check_wide.field("name", "reference_limit")
      .field("max_difference", wide_diff)
      .field("pass", wide_ok);
  JsonObject check_sharp;
  check_sharp.field("name", "lp_limit")
      .field("sweep_final_cost", sharp_cost)
      .field("exact_cost", lp.optimal_cost)
      .field("pass", sharp_ok);
  std::string checks =
      "[" + check_two.str() + "," + check_wide.str() + "," + check_sharp.str() + "]";

  JsonObject o;
  o.field("command", "verify")
      .field("converged", all_ok)
      .field("iterations", base.iterations);
  if (request.include_plan) o.field("plan", base.plan.entries());
  o.field("transport_cost", base.objective.transport_cost)
      .field("kl_term", base.objective.kl_term)
      .field("total_objective", base.objective.total)
      .field("marginal_residual", plan_residual(base.plan))
      .field_json("checks", checks);
  out << o.str() << "\n";
  return all_ok ? 0 : 2;
}

}  // namespace

int run_request(const CliRequest& request, std::ostream& out, std::ostream& err) {
  try {
    ProblemInstance instance = load_problem(request);
    if (request.command == "exact") return run_exact(instance, request, out);

    ReferenceDensity phi = resolve_reference(request, instance);
    if (request.command == "sweep") return run_sweep(instance, phi, request, out);

    double epsilon = resolve_epsilon(request, instance);
    if (request.command == "solve") {
      return run_solve(instance, phi, epsilon, request, out);
    }
    if (request.command == "constrained") {
      return run_constrained(instance, phi, epsilon, request, out);
    }
    if (request.command == "verify") {
      return run_verify(instance, phi, epsilon, request, out);
    }
    throw InvalidArgument("unknown command \"" + request.command + "\"");
  } catch (const InfeasibleSupport& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  } catch (const EmptyFeasibleSet& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  } catch (const Infeasible& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace fpdot

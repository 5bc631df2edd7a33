#include <doctest.h>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "fpdot/cli.hpp"
#include "fpdot/densities.hpp"
#include "fpdot/instance.hpp"
#include "fpdot/report.hpp"
#include "test_support.hpp"

using namespace fpdot;
using testsup::close;

namespace {

std::filesystem::path write_temp(const std::string& name, const std::string& body) {
  std::filesystem::path path = std::filesystem::temp_directory_path() / name;
  std::ofstream out(path);
  out << body;
  return path;
}

const char* kIdentityInstance = R"({
  "mu": [0.5, 0.5],
  "nu": [0.5, 0.5],
  "cost": [[0.0, 1.0], [1.0, 0.0]]
})";

struct CliRun {
  int exit_code;
  std::string out;
  std::string err;
  nlohmann::json report;
};

CliRun run(const CliRequest& request) {
  std::ostringstream out;
  std::ostringstream err;
  int code = run_request(request, out, err);
  nlohmann::json report;
  if (!out.str().empty()) report = nlohmann::json::parse(out.str());
  return {code, out.str(), err.str(), report};
}

}  // namespace

TEST_CASE("a minimal instance defaults to the uniform reference") {
  auto path = write_temp("fpdot_min.json", kIdentityInstance);
  ProblemInstance inst = parse_instance(path.string());
  CHECK(inst.mu.size() == 2);
  CHECK(inst.nu.size() == 2);
  CHECK(inst.cost(0, 1) == 1.0);
  CHECK(inst.reference.kind() == ReferenceKind::kUniform);
  CHECK_FALSE(inst.epsilon.has_value());
  CHECK_FALSE(inst.moment.has_value());
}

TEST_CASE("optional instance fields are honored") {
  auto path = write_temp("fpdot_full.json", R"({
    "mu": [0.5, 0.5], "nu": [0.5, 0.5], "cost": [[0, 1], [1, 0]],
    "epsilon": 0.25,
    "reference": {"kind": "product"},
    "moment": {"chi": [[0, 1], [1, 0]], "eta": 0.2}
  })");
  ProblemInstance inst = parse_instance(path.string());
  CHECK(inst.epsilon == 0.25);
  CHECK(inst.reference.kind() == ReferenceKind::kProductOfMarginals);
  REQUIRE(inst.moment.has_value());
  CHECK(inst.moment->eta() == 0.2);
  CHECK(inst.moment->chi()(0, 1) == 1.0);
}

TEST_CASE("explicit reference matrices are checked at parse time") {
  auto good = write_temp("fpdot_refmat.json", R"({
    "mu": [0.5, 0.5], "nu": [0.5, 0.5], "cost": [[0, 1], [1, 0]],
    "reference": {"kind": "matrix", "matrix": [[0.3, 0.2], [0.2, 0.3]]}
  })");
  CHECK(parse_instance(good.string()).reference.kind() ==
        ReferenceKind::kExplicitMatrix);

  auto bad_shape = write_temp("fpdot_refmat_bad.json", R"({
    "mu": [0.5, 0.5], "nu": [0.5, 0.5], "cost": [[0, 1], [1, 0]],
    "reference": {"kind": "matrix", "matrix": [[0.5, 0.5]]}
  })");
  CHECK_THROWS_AS(parse_instance(bad_shape.string()), DimensionMismatch);

  auto no_matrix = write_temp("fpdot_refmat_missing.json", R"({
    "mu": [0.5, 0.5], "nu": [0.5, 0.5], "cost": [[0, 1], [1, 0]],
    "reference": {"kind": "matrix"}
  })");
  CHECK_THROWS_AS(parse_instance(no_matrix.string()), ParseError);
}

TEST_CASE("structural problems raise parse errors naming the field") {
  auto ragged = write_temp("fpdot_ragged.json", R"({
    "mu": [0.5, 0.5], "nu": [0.5, 0.5], "cost": [[0, 1], [1]]
  })");
  CHECK_THROWS_WITH_AS(parse_instance(ragged.string()),
                       doctest::Contains("cost"), ParseError);

  auto missing = write_temp("fpdot_missing.json", R"({"mu": [1.0]})");
  CHECK_THROWS_AS(parse_instance(missing.string()), ParseError);

  auto bad_type = write_temp("fpdot_badtype.json", R"({
    "mu": "not an array", "nu": [0.5, 0.5], "cost": [[0, 1], [1, 0]]
  })");
  CHECK_THROWS_AS(parse_instance(bad_type.string()), ParseError);

  auto garbage = write_temp("fpdot_garbage.json", "{not json");
  CHECK_THROWS_AS(parse_instance(garbage.string()), ParseError);

  CHECK_THROWS_AS(parse_instance("/nonexistent/fpdot.json"), ParseError);
}

TEST_CASE("value problems raise the usual validation errors") {
  auto negative = write_temp("fpdot_negative.json", R"({
    "mu": [-0.5, 1.5], "nu": [0.5, 0.5], "cost": [[0, 1], [1, 0]]
  })");
  CHECK_THROWS_AS(parse_instance(negative.string()), NegativeWeight);

  auto shape = write_temp("fpdot_shape.json", R"({
    "mu": [0.5, 0.5], "nu": [0.5, 0.5], "cost": [[0, 1, 2], [1, 0, 2]]
  })");
  CHECK_THROWS_AS(parse_instance(shape.string()), DimensionMismatch);
}

TEST_CASE("csv costs pair with uniform marginals") {
  auto path = write_temp("fpdot_cost.csv", "0.0, 1.0, 2.0\r\n3.0,4.0,5.0\n");
  ProblemInstance inst = instance_from_cost_csv(path.string());
  CHECK(inst.mu.size() == 2);
  CHECK(inst.nu.size() == 3);
  CHECK(inst.mu[0] == 0.5);
  CHECK(close(inst.nu[2], 1.0 / 3.0, 1e-15));
  CHECK(inst.cost(1, 2) == 5.0);

  auto ragged = write_temp("fpdot_ragged.csv", "0,1\n2\n");
  CHECK_THROWS_AS(instance_from_cost_csv(ragged.string()), ParseError);

  auto garbage = write_temp("fpdot_garbage.csv", "0,abc\n1,2\n");
  CHECK_THROWS_AS(instance_from_cost_csv(garbage.string()), ParseError);
}

TEST_CASE("matrix files reject non-rectangular input") {
  auto good = write_temp("fpdot_mat.json", "[[0.25, 0.25], [0.25, 0.25]]");
  Matrix m = load_matrix_file(good.string());
  CHECK(m.rows() == 2);
  CHECK(m(1, 1) == 0.25);

  auto bad = write_temp("fpdot_mat_bad.json", "[[0.25], [0.25, 0.5]]");
  CHECK_THROWS_AS(load_matrix_file(bad.string()), ParseError);
}

TEST_CASE("doubles print with seventeen significant digits") {
  CHECK(format_double(1.0 / 3.0) == "0.33333333333333331");
  CHECK(format_double(0.5) == "0.5");
  CHECK(format_double(kPosInf) == "null");
  CHECK(format_double(std::nan("")) == "null");
}

TEST_CASE("json objects keep field order and escape strings") {
  JsonObject obj;
  obj.field("b", 2).field("a", true).field("s", "x\"y\\z\n");
  CHECK(obj.str() == R"({"b":2,"a":true,"s":"x\"y\\z\n"})");

  JsonObject with_matrix;
  with_matrix.field("m", Matrix::from_rows({{0.5, 0.25}, {0.125, 0.125}}));
  CHECK(with_matrix.str() == R"({"m":[[0.5,0.25],[0.125,0.125]]})");
}

TEST_CASE("solve reports a near-diagonal plan for the identity cost") {
  auto path = write_temp("fpdot_cli_solve.json", kIdentityInstance);
  CliRequest request;
  request.command = "solve";
  request.instance_path = path.string();
  request.epsilon = 0.1;
  CliRun result = run(request);
  REQUIRE(result.exit_code == 0);
  CHECK(result.report["command"] == "solve");
  CHECK(result.report["converged"] == true);
  CHECK(result.report["plan"][0][0].get<double>() > 0.49);
  CHECK(result.report["plan"][0][1].get<double>() < 1e-4);
  CHECK(result.report["transport_cost"].get<double>() < 1e-3);
  CHECK(result.report.contains("kl_term"));
  CHECK(result.report.contains("total_objective"));
  CHECK(result.report.contains("dual_log_u"));
}

TEST_CASE("reported plans satisfy the reported residual") {
  auto path = write_temp("fpdot_cli_roundtrip.json", R"({
    "mu": [0.2, 0.3, 0.5], "nu": [0.4, 0.6],
    "cost": [[0.1, 0.9], [0.4, 0.2], [0.7, 0.3]], "epsilon": 0.3
  })");
  CliRequest request;
  request.command = "solve";
  request.instance_path = path.string();
  CliRun result = run(request);
  REQUIRE(result.exit_code == 0);

  std::vector<std::vector<double>> rows =
      result.report["plan"].get<std::vector<std::vector<double>>>();
  TransportPlan plan(Matrix::from_rows(rows));
  DiscreteDensity mu({0.2, 0.3, 0.5});
  DiscreteDensity nu({0.4, 0.6});
  double residual = result.report["marginal_residual"].get<double>();
  CHECK(validate_membership(plan, mu, nu, residual + 1e-15).within_tolerance);
}

TEST_CASE("exact finds the free diagonal routing") {
  auto path = write_temp("fpdot_cli_exact.json", kIdentityInstance);
  CliRequest request;
  request.command = "exact";
  request.instance_path = path.string();
  CliRun result = run(request);
  REQUIRE(result.exit_code == 0);
  CHECK(result.report["transport_cost"].get<double>() == 0.0);
  CHECK(result.report["plan"][0][0].get<double>() == 0.5);
  CHECK_FALSE(result.report.contains("kl_term"));
}

TEST_CASE("exact accepts a bare csv cost matrix") {
  auto path = write_temp("fpdot_cli_exact.csv", "0,1\n1,0\n");
  CliRequest request;
  request.command = "exact";
  request.cost_csv_path = path.string();
  CliRun result = run(request);
  REQUIRE(result.exit_code == 0);
  CHECK(result.report["transport_cost"].get<double>() == 0.0);
}

TEST_CASE("input errors exit with code one") {
  auto path = write_temp("fpdot_cli_errors.json", kIdentityInstance);

  CliRequest no_epsilon;
  no_epsilon.command = "solve";
  no_epsilon.instance_path = path.string();
  CliRun missing = run(no_epsilon);
  CHECK(missing.exit_code == 1);
  CHECK(missing.err.find("epsilon") != std::string::npos);

  CliRequest both;
  both.command = "solve";
  both.instance_path = path.string();
  both.cost_csv_path = path.string();
  both.epsilon = 1.0;
  CHECK(run(both).exit_code == 1);

  CliRequest empty_sweep;
  empty_sweep.command = "sweep";
  empty_sweep.instance_path = path.string();
  CHECK(run(empty_sweep).exit_code == 1);

  CliRequest no_moment;
  no_moment.command = "constrained";
  no_moment.instance_path = path.string();
  no_moment.epsilon = 0.5;
  CHECK(run(no_moment).exit_code == 1);

  CliRequest no_input;
  no_input.command = "solve";
  no_input.epsilon = 0.5;
  CHECK(run(no_input).exit_code == 1);

  CliRequest bad_reference;
  bad_reference.command = "solve";
  bad_reference.instance_path = path.string();
  bad_reference.epsilon = 0.5;
  bad_reference.reference_spec = "diagonal";
  CHECK(run(bad_reference).exit_code == 1);
}

TEST_CASE("infeasible problems exit with code three") {
  auto support = write_temp("fpdot_cli_support.json", R"({
    "mu": [0.5, 0.5], "nu": [0.5, 0.5], "cost": [[0, 1], [1, 0]],
    "epsilon": 1.0,
    "reference": {"kind": "matrix", "matrix": [[0.0, 0.0], [0.5, 0.5]]}
  })");
  CliRequest infeasible_support;
  infeasible_support.command = "solve";
  infeasible_support.instance_path = support.string();
  CliRun support_run = run(infeasible_support);
  CHECK(support_run.exit_code == 3);
  CHECK(support_run.err.find("error:") != std::string::npos);

  auto moment = write_temp("fpdot_cli_empty.json", R"({
    "mu": [0.5, 0.5], "nu": [0.5, 0.5], "cost": [[1, 2], [2, 1]],
    "epsilon": 1.0, "moment": {"chi": [[1, 2], [2, 1]], "eta": 0.5}
  })");
  CliRequest empty_feasible;
  empty_feasible.command = "constrained";
  empty_feasible.instance_path = moment.string();
  CHECK(run(empty_feasible).exit_code == 3);
}

TEST_CASE("sweep reports one result per temperature") {
  auto path = write_temp("fpdot_cli_sweep.json", kIdentityInstance);
  CliRequest request;
  request.command = "sweep";
  request.instance_path = path.string();
  request.sweep_epsilons = {10.0, 1.0, 0.1};
  CliRun result = run(request);
  REQUIRE(result.exit_code == 0);
  REQUIRE(result.report["results"].size() == 3);
  double previous = 1e300;
  for (const auto& entry : result.report["results"]) {
    CHECK(entry["converged"] == true);
    double cost = entry["transport_cost"].get<double>();
    CHECK(cost <= previous + 1e-12);
    previous = cost;
  }
  CHECK(result.report["results"][2]["epsilon"].get<double>() == 0.1);
}

TEST_CASE("constrained reports the moment and its activity") {
  auto path = write_temp("fpdot_cli_constrained.json", R"({
    "mu": [0.5, 0.5], "nu": [0.5, 0.5], "cost": [[0, 1], [1, 0]],
    "epsilon": 1.0, "moment": {"chi": [[0, 1], [1, 0]], "eta": 0.2}
  })");
  CliRequest request;
  request.command = "constrained";
  request.instance_path = path.string();
  CliRun result = run(request);
  REQUIRE(result.exit_code == 0);
  CHECK(result.report["constraint_active"] == true);
  CHECK(close(result.report["moment_value"].get<double>(), 0.2, 1e-6));
}

TEST_CASE("verify runs all checks on a seeded instance") {
  CliRequest request;
  request.command = "verify";
  request.seed = 42;
  CliRun result = run(request);
  REQUIRE(result.exit_code == 0);
  REQUIRE(result.report["checks"].size() == 3);
  for (const auto& check : result.report["checks"]) {
    CHECK(check["pass"] == true);
  }
  CHECK(result.report["converged"] == true);
}

TEST_CASE("suppressing the plan removes only the plan") {
  auto path = write_temp("fpdot_cli_noplan.json", kIdentityInstance);
  CliRequest request;
  request.command = "solve";
  request.instance_path = path.string();
  request.epsilon = 0.5;
  request.include_plan = false;
  CliRun result = run(request);
  REQUIRE(result.exit_code == 0);
  CHECK_FALSE(result.report.contains("plan"));
  CHECK(result.report.contains("transport_cost"));
}

TEST_CASE("identical requests produce identical bytes") {
  auto path = write_temp("fpdot_cli_det.json", kIdentityInstance);
  for (const char* command : {"solve", "exact", "verify"}) {
    CliRequest request;
    request.command = command;
    request.instance_path = path.string();
    request.epsilon = 0.35;
    CHECK(run(request).out == run(request).out);
  }
}

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "fpdot/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Discrete optimal transport as KL projection onto an ideal design"};
  app.require_subcommand(1);

  fpdot::CliRequest request;
  bool no_plan = false;

  auto common = [&](CLI::App* cmd) {
    cmd->add_option("instance", request.instance_path, "JSON instance file");
    cmd->add_option("--cost-csv", request.cost_csv_path,
                    "bare CSV cost matrix, paired with uniform marginals");
    cmd->add_option("--epsilon", request.epsilon, "regularization constant");
    cmd->add_option("--max-iter", request.max_iterations, "iteration cap");
    cmd->add_option("--tol", request.tolerance, "L1 marginal residual target");
    cmd->add_option("--reference", request.reference_spec,
                    "uniform | product | matrix:<path>");
    cmd->add_flag("--no-plan", no_plan, "omit the plan matrix from the report");
    return cmd;
  };

  common(app.add_subcommand("solve", "scale the ideal design to the marginals"));
  common(app.add_subcommand("exact", "transportation-simplex baseline"));
  common(app.add_subcommand("sweep", "solve across a list of epsilons"))
      ->add_option("--sweep", request.sweep_epsilons, "comma-separated epsilons")
      ->delimiter(',');
  common(app.add_subcommand("constrained", "solve with the instance's moment bound"));
  common(app.add_subcommand("verify",
                            "equivalence and limit checks, on a random instance "
                            "unless one is given"))
      ->add_option("--seed", request.seed, "seed for the synthesized instance");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  request.command = app.get_subcommands().front()->get_name();
  request.include_plan = !no_plan;
  return fpdot::run_request(request, std::cout, std::cerr);
}

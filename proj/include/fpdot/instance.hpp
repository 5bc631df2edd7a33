#pragma once

#include <optional>
#include <string>

#include "fpdot/densities.hpp"
#include "fpdot/fpd_constraints.hpp"

namespace fpdot {

/// One fully validated problem read from disk. The reference defaults to
/// uniform when the file omits it; epsilon stays empty so the command layer
/// can insist on a flag.
struct ProblemInstance {
  DiscreteDensity mu;
  DiscreteDensity nu;
  CostMatrix cost;
  std::optional<double> epsilon;
  ReferenceDensity reference;
  std::optional<MomentConstraint> moment;
};

/// Reads a JSON instance file:
///   {"mu": [..], "nu": [..], "cost": [[..]],
///    "epsilon": r?, "reference": {"kind": "uniform"|"product"|"matrix",
///    "matrix": [[..]]?}?, "moment": {"chi": [[..]], "eta": r}?}
/// Structural problems raise ParseError with field context; value problems
/// raise the usual density/cost validation errors.
ProblemInstance parse_instance(const std::string& path);

/// Reads a bare comma-separated cost matrix and pairs it with uniform
/// marginals sized to fit.
ProblemInstance instance_from_cost_csv(const std::string& path);

/// Reads a JSON array-of-arrays matrix (the --reference matrix:<path> file).
Matrix load_matrix_file(const std::string& path);

}  // namespace fpdot

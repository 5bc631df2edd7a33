#pragma once

#include <random>

#include "fpdot/densities.hpp"

namespace fpdot {

struct RandomInstance {
  DiscreteDensity mu;
  DiscreteDensity nu;
  CostMatrix cost;
};

/// Draws marginals bounded below by 0.01 (normalized mixtures of uniform
/// noise and a 0.01 floor) and costs uniform in [0, 1]. Draw order is fixed:
/// mu, then nu, then the cost row-major, so a seed pins the whole instance.
RandomInstance make_random_instance(std::size_t n, std::size_t m, std::mt19937_64& rng);

}  // namespace fpdot

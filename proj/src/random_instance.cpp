#include "fpdot/random_instance.hpp"

#include <algorithm>
#include <vector>

#include "fpdot/numeric.hpp"

namespace fpdot {

namespace {

std::vector<double> random_marginal(std::size_t n, std::mt19937_64& rng) {
  std::vector<double> raw(n);
  for (double& r : raw) r = uniform01(rng);
  double total = kahan_sum(raw);
  std::vector<double> w(n);
  const double slack = 1.0 - 0.01 * static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) w[i] = 0.01 + slack * raw[i] / total;
  return w;
}

}  // namespace

RandomInstance make_random_instance(std::size_t n, std::size_t m,
                                    std::mt19937_64& rng) {
  if (n == 0 || m == 0 || 0.01 * static_cast<double>(std::max(n, m)) >= 1.0) {
    throw InvalidArgument("random instances need 1 <= n, m < 100");
  }
  DiscreteDensity mu(random_marginal(n, rng));
  DiscreteDensity nu(random_marginal(m, rng));
  Matrix c(n, m);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) c(i, j) = uniform01(rng);
  return RandomInstance{std::move(mu), std::move(nu), CostMatrix(std::move(c))};
}

}  // namespace fpdot

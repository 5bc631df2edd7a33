#include "fpdot/exact_lp.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <utility>
#include <vector>

#include "fpdot/divergence.hpp"

namespace fpdot {

namespace {

constexpr double kEnteringTolerance = 1e-11;
constexpr std::size_t kCellGuard = 1'000'000;

struct Cell {
  std::size_t i, j;
};

bool lex_less(const Cell& a, const Cell& b) {
  return a.i != b.i ? a.i < b.i : a.j < b.j;
}

// Basis bookkeeping: the n+m-1 basic cells form a spanning tree of the
// bipartite graph with row nodes 0..n-1 and column nodes n..n+m-1.
struct Basis {
  std::size_t n, m;
  std::vector<char> is_basic;  // n*m flags
  std::vector<Cell> cells;

  Basis(std::size_t n_, std::size_t m_) : n(n_), m(m_), is_basic(n_ * m_, 0) {}

  bool basic(std::size_t i, std::size_t j) const { return is_basic[i * m + j] != 0; }
  void add(std::size_t i, std::size_t j) {
    is_basic[i * m + j] = 1;
    cells.push_back({i, j});
  }
  void remove(std::size_t i, std::size_t j) {
    is_basic[i * m + j] = 0;
    cells.erase(std::find_if(cells.begin(), cells.end(),
                             [&](const Cell& c) { return c.i == i && c.j == j; }));
  }
};

// Northwest-corner rule. Advancing exactly one index per allocation yields
// n+m-1 basic cells, inserting degenerate zeros on ties.
void northwest_corner(const DiscreteDensity& mu, const DiscreteDensity& nu, Matrix& x,
                      Basis& basis) {
  const std::size_t n = mu.size(), m = nu.size();
  std::vector<double> a = mu.weights();
  std::vector<double> b = nu.weights();
  std::size_t i = 0, j = 0;
  while (true) {
    double t = std::min(a[i], b[j]);
    x(i, j) = t;
    basis.add(i, j);
    a[i] -= t;
    b[j] -= t;
    if (i == n - 1 && j == m - 1) break;
    if (i == n - 1) {
      ++j;
    } else if (j == m - 1) {
      ++i;
    } else if (a[i] == 0.0) {
      ++i;  // row exhausted (ties included) moves down
    } else {
      ++j;
    }
  }
}

// Solves u_i + v_j = c_ij over the basis tree, anchored at u_0 = 0.
void compute_duals(const Basis& basis, const CostMatrix& cost, std::vector<double>& u,
                   std::vector<double>& v) {
  const std::size_t n = basis.n, m = basis.m;
  std::vector<std::vector<std::size_t>> row_cells(n), col_cells(m);
  for (std::size_t k = 0; k < basis.cells.size(); ++k) {
    row_cells[basis.cells[k].i].push_back(k);
    col_cells[basis.cells[k].j].push_back(k);
  }
  std::vector<char> row_done(n, 0), col_done(m, 0);
  u.assign(n, 0.0);
  v.assign(m, 0.0);
  std::deque<std::pair<char, std::size_t>> queue;  // ('r', i) or ('c', j)
  row_done[0] = 1;
  queue.emplace_back('r', 0);
  std::size_t settled = 1;
  while (!queue.empty()) {
    auto [kind, idx] = queue.front();
    queue.pop_front();
    if (kind == 'r') {
      for (std::size_t k : row_cells[idx]) {
        std::size_t j = basis.cells[k].j;
        if (col_done[j]) continue;
        v[j] = cost(idx, j) - u[idx];
        col_done[j] = 1;
        ++settled;
        queue.emplace_back('c', j);
      }
    } else {
      for (std::size_t k : col_cells[idx]) {
        std::size_t i = basis.cells[k].i;
        if (row_done[i]) continue;
        u[i] = cost(i, idx) - v[idx];
        row_done[i] = 1;
        ++settled;
        queue.emplace_back('r', i);
      }
    }
  }
  if (settled != n + m) {
    throw Error("transportation basis is not a spanning tree");
  }
}

// Unique tree path from row node enter_i to column node enter_j, returned as
// the list of basic cells along it (first incident to the row, last to the
// column).
std::vector<Cell> basis_path(const Basis& basis, std::size_t enter_i,
                             std::size_t enter_j) {
  const std::size_t n = basis.n, m = basis.m;
  const std::size_t node_count = n + m;  // rows then columns
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> adj(node_count);
  for (const Cell& c : basis.cells) {
    std::size_t r = c.i, cnode = n + c.j;
    adj[r].emplace_back(cnode, c.j);
    adj[cnode].emplace_back(r, c.i);
  }
  std::vector<std::size_t> parent(node_count, node_count);
  std::vector<char> seen(node_count, 0);
  std::deque<std::size_t> queue;
  seen[enter_i] = 1;
  queue.push_back(enter_i);
  const std::size_t target = n + enter_j;
  while (!queue.empty()) {
    std::size_t node = queue.front();
    queue.pop_front();
    if (node == target) break;
    for (auto [next, unused] : adj[node]) {
      (void)unused;
      if (!seen[next]) {
        seen[next] = 1;
        parent[next] = node;
        queue.push_back(next);
      }
    }
  }
  if (!seen[target]) throw Error("entering cell closes no cycle");

  std::vector<std::size_t> nodes;
  for (std::size_t node = target; node != node_count; node = parent[node]) {
    nodes.push_back(node);
    if (node == enter_i) break;
  }
  std::reverse(nodes.begin(), nodes.end());  // enter_i ... target
  std::vector<Cell> path;
  for (std::size_t k = 0; k + 1 < nodes.size(); ++k) {
    std::size_t a = nodes[k], b = nodes[k + 1];
    std::size_t row = a < n ? a : b;
    std::size_t col = (a < n ? b : a) - n;
    path.push_back({row, col});
  }
  return path;
}

}  // namespace

LpSolution solve_exact(const DiscreteDensity& mu, const DiscreteDensity& nu,
                       const CostMatrix& cost) {
  const std::size_t n = mu.size(), m = nu.size();
  if (cost.rows() != n || cost.cols() != m) {
    throw DimensionMismatch("solve_exact: cost is " + std::to_string(cost.rows()) + "x" +
                            std::to_string(cost.cols()) + ", marginals are (" +
                            std::to_string(n) + ", " + std::to_string(m) + ")");
  }
  if (n * m > kCellGuard) {
    throw SizeGuardExceeded("solve_exact: " + std::to_string(n * m) +
                            " cells exceeds the desk-scale guard of 1e6");
  }

  Matrix x(n, m, 0.0);
  Basis basis(n, m);
  northwest_corner(mu, nu, x, basis);

  std::vector<double> u, v;
  const std::size_t pivot_cap = 1000 + 50 * n * m;
  std::size_t pivots = 0;
  while (true) {
    compute_duals(basis, cost, u, v);

    // Bland's rule: lexicographically first cell with negative reduced cost.
    bool found = false;
    Cell entering{0, 0};
    for (std::size_t i = 0; i < n && !found; ++i) {
      for (std::size_t j = 0; j < m && !found; ++j) {
        if (basis.basic(i, j)) continue;
        if (cost(i, j) - u[i] - v[j] < -kEnteringTolerance) {
          entering = {i, j};
          found = true;
        }
      }
    }
    if (!found) break;

    std::vector<Cell> path = basis_path(basis, entering.i, entering.j);
    // Walking the cycle from the entering cell, path cells at odd positions
    // give up theta.
    double theta = kPosInf;
    Cell leaving{0, 0};
    bool have_leaving = false;
    for (std::size_t p = 0; p < path.size(); p += 2) {
      const Cell& c = path[p];
      double value = x(c.i, c.j);
      if (value < theta || (value == theta && (!have_leaving || lex_less(c, leaving)))) {
        theta = value;
        leaving = c;
        have_leaving = true;
      }
    }
    for (std::size_t p = 0; p < path.size(); ++p) {
      const Cell& c = path[p];
      x(c.i, c.j) += (p % 2 == 0) ? -theta : theta;
      if (x(c.i, c.j) < 0.0) x(c.i, c.j) = 0.0;  // subtraction dust on ties
    }
    x(entering.i, entering.j) = theta;
    basis.add(entering.i, entering.j);
    x(leaving.i, leaving.j) = 0.0;
    basis.remove(leaving.i, leaving.j);

    if (++pivots > pivot_cap) {
      throw Error("transportation simplex exceeded pivot cap");
    }
  }

  std::vector<double> cost_terms(n * m);
  for (std::size_t k = 0; k < n * m; ++k)
    cost_terms[k] = cost.entries().flat()[k] * x.flat()[k];
  double optimal_cost = kahan_sum(cost_terms);

  bool degenerate = false;
  for (const Cell& c : basis.cells) {
    if (x(c.i, c.j) < 1e-13) degenerate = true;
  }

  TransportPlan plan(std::move(x), mu, nu);
  return LpSolution{std::move(plan),
                    optimal_cost,
                    static_cast<int>(basis.cells.size()),
                    degenerate,
                    std::move(u),
                    std::move(v),
                    static_cast<int>(pivots)};
}

namespace {

// Plan on the 2x2 marginal segment; entries clamped against -1e-15 dust.
Matrix two_by_two_plan(double t, double mu0, double nu0) {
  Matrix p(2, 2);
  p(0, 0) = t;
  p(0, 1) = mu0 - t;
  p(1, 0) = nu0 - t;
  p(1, 1) = 1.0 - mu0 - nu0 + t;
  for (double& e : p.flat()) {
    if (e < 0.0 && e > -1e-12) e = 0.0;
  }
  return p;
}

}  // namespace

TransportPlan brute_force_regularized(const DiscreteDensity& mu,
                                      const DiscreteDensity& nu, const CostMatrix& cost,
                                      double epsilon, const ReferenceDensity& phi,
                                      int grid_resolution) {
  if (mu.size() != 2 || nu.size() != 2) {
    throw UnsupportedSize("brute_force_regularized handles 2x2 problems only");
  }
  if (cost.rows() != 2 || cost.cols() != 2) {
    throw DimensionMismatch("brute_force_regularized: cost must be 2x2");
  }
  if (grid_resolution < 1000) {
    throw InvalidArgument("grid_resolution must be at least 1000");
  }
  if (epsilon <= 0.0) {
    throw EpsilonNotPositive("brute_force_regularized: epsilon = " +
                             std::to_string(epsilon));
  }

  const double mu0 = mu[0], nu0 = nu[0];
  const double lo = std::max(0.0, mu0 + nu0 - 1.0);
  const double hi = std::min(mu0, nu0);

  auto objective = [&](double t) -> double {
    try {
      TransportPlan plan(two_by_two_plan(t, mu0, nu0), mu, nu);
      return regularized_objective(plan, cost, epsilon, phi).total;
    } catch (const Infeasible&) {
      return kPosInf;
    }
  };

  if (hi - lo <= 0.0) {
    // Marginals pin the plan to a single point.
    return TransportPlan(two_by_two_plan(lo, mu0, nu0), mu, nu);
  }

  const int r = grid_resolution;
  double best_t = lo;
  double best_f = kPosInf;
  for (int k = 0; k <= r; ++k) {
    double t = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(r);
    double f = objective(t);
    if (f < best_f) {
      best_f = f;
      best_t = t;
    }
  }

  // Golden-section refinement in a one-grid-step neighborhood of the best
  // grid point. The objective is strictly convex in t, so the bracket holds
  // the minimizer.
  const double h = (hi - lo) / static_cast<double>(r);
  double a = std::max(lo, best_t - h);
  double b = std::min(hi, best_t + h);
  const double inv_phi_ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - inv_phi_ratio * (b - a);
  double x2 = a + inv_phi_ratio * (b - a);
  double f1 = objective(x1);
  double f2 = objective(x2);
  for (int it = 0; it < 200 && (b - a) > 1e-14; ++it) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi_ratio * (b - a);
      f1 = objective(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi_ratio * (b - a);
      f2 = objective(x2);
    }
  }
  double t_refined = 0.5 * (a + b);
  if (objective(t_refined) > best_f) t_refined = best_t;  // keep the grid winner
  return TransportPlan(two_by_two_plan(t_refined, mu0, nu0), mu, nu);
}

}  // namespace fpdot

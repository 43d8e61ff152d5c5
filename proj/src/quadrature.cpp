// Copyright 2026 The nesslab Authors
// SPDX-License-Identifier: Apache-2.0

#include "nesslab/quadrature.hpp"

#include <boost/math/special_functions/legendre.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace nesslab {

GaussLegendre gauss_legendre(std::size_t n) {
  if (n == 0) throw std::invalid_argument("Gauss-Legendre rule needs at least one node");
  static std::mutex mutex;
  static std::map<std::size_t, GaussLegendre> cache;
  std::lock_guard lock(mutex);
  if (auto it = cache.find(n); it != cache.end()) return it->second;

  const auto order = static_cast<int>(n);
  const std::vector<double> zeros = boost::math::legendre_p_zeros<double>(order);  // nonnegative, ascending
  auto weight = [order](double x) {
    const double d = boost::math::legendre_p_prime(order, x);
    return 2.0 / ((1.0 - x * x) * d * d);
  };
  GaussLegendre rule;
  for (auto it = zeros.rbegin(); it != zeros.rend(); ++it) {
    if (*it == 0.0) continue;
    rule.nodes.push_back(-*it);
    rule.weights.push_back(weight(*it));
  }
  for (double x : zeros) {
    rule.nodes.push_back(x);
    rule.weights.push_back(weight(x));
  }
  return cache.emplace(n, std::move(rule)).first->second;
}

namespace {

void append_panel(EnergyGrid& grid, double a, double b, const GaussLegendre& rule) {
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double th = mid + half * rule.nodes[i];
    grid.theta.push_back(th);
    grid.energy.push_back(2.0 * grid.t_c * std::cos(th));
    grid.weight.push_back(half * rule.weights[i] * 2.0 * grid.t_c * std::sin(th));
  }
}

// Sorts by ascending energy so tables read naturally.
void sort_by_energy(EnergyGrid& g) {
  std::vector<std::size_t> idx(g.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return g.energy[a] < g.energy[b]; });
  EnergyGrid out;
  out.t_c = g.t_c;
  for (auto i : idx) {
    out.theta.push_back(g.theta[i]);
    out.energy.push_back(g.energy[i]);
    out.weight.push_back(g.weight[i]);
  }
  g = std::move(out);
}

}  // namespace

EnergyGrid make_theta_grid(double t_c, std::size_t nodes, std::span<const double> breakpoints) {
  if (!(t_c > 0.0)) throw std::invalid_argument("t_c must be positive");
  if (nodes < 4) throw std::invalid_argument("theta grid needs at least 4 nodes");
  std::vector<double> cuts{0.0, std::numbers::pi};
  for (double e : breakpoints) {
    if (std::abs(e) < 2.0 * t_c) cuts.push_back(std::acos(e / (2.0 * t_c)));
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end(), [](double a, double b) { return std::abs(a - b) < 1e-12; }),
             cuts.end());
  const std::size_t panels = cuts.size() - 1;
  if (nodes < 4 * panels) throw std::invalid_argument("too few nodes for the requested breakpoints");

  // Largest-remainder allocation with a floor of 4 nodes per panel.
  std::vector<std::size_t> count(panels, 4);
  std::size_t left = nodes - 4 * panels;
  std::vector<double> share(panels);
  for (std::size_t p = 0; p < panels; ++p) share[p] = left * (cuts[p + 1] - cuts[p]) / std::numbers::pi;
  std::size_t used = 0;
  for (std::size_t p = 0; p < panels; ++p) {
    const auto whole = static_cast<std::size_t>(std::floor(share[p]));
    count[p] += whole;
    used += whole;
  }
  std::vector<std::size_t> order(panels);
  for (std::size_t p = 0; p < panels; ++p) order[p] = p;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return share[a] - std::floor(share[a]) > share[b] - std::floor(share[b]);
  });
  for (std::size_t i = 0; used < left; ++i, ++used) ++count[order[i % panels]];

  EnergyGrid grid;
  grid.t_c = t_c;
  for (std::size_t p = 0; p < panels; ++p) append_panel(grid, cuts[p], cuts[p + 1], gauss_legendre(count[p]));
  sort_by_energy(grid);
  return grid;
}

EnergyGrid make_panel_grid(double t_c, std::size_t panels, std::size_t per_panel) {
  if (!(t_c > 0.0) || panels == 0 || per_panel == 0) throw std::invalid_argument("invalid panel grid");
  const GaussLegendre rule = gauss_legendre(per_panel);
  EnergyGrid grid;
  grid.t_c = t_c;
  const double h = std::numbers::pi / static_cast<double>(panels);
  for (std::size_t p = 0; p < panels; ++p) append_panel(grid, p * h, (p + 1) * h, rule);
  sort_by_energy(grid);
  return grid;
}

double simpson(std::span<const double> f, double h) {
  const std::size_t n = f.size();
  if (n < 2) return 0.0;
  if (n == 2) return 0.5 * h * (f[0] + f[1]);
  if (n == 4) return 3.0 * h / 8.0 * (f[0] + 3.0 * f[1] + 3.0 * f[2] + f[3]);
  std::size_t intervals = n - 1;
  std::size_t end = n;
  double tail = 0.0;
  if (intervals % 2 == 1) {
    tail = 3.0 * h / 8.0 * (f[n - 4] + 3.0 * f[n - 3] + 3.0 * f[n - 2] + f[n - 1]);
    end = n - 3;
  }
  double s = f[0] + f[end - 1];
  for (std::size_t i = 1; i + 1 < end; ++i) s += (i % 2 == 1 ? 4.0 : 2.0) * f[i];
  return s * h / 3.0 + tail;
}

}  // namespace nesslab

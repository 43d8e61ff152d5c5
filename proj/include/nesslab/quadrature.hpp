// Copyright 2026 The nesslab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace nesslab {

/// Gauss-Legendre rule on [-1, 1].
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;
};

GaussLegendre gauss_legendre(std::size_t n);

/// Quadrature over the open band with E = 2 t_c cos(theta).
/// `weight[i]` already contains the Jacobian, so sum_i weight[i] f(energy[i])
/// approximates the integral of f over (-2 t_c, 2 t_c).
struct EnergyGrid {
  double t_c = 1.0;
  std::vector<double> theta;
  std::vector<double> energy;
  std::vector<double> weight;

  std::size_t size() const { return energy.size(); }
};

/// Composite Gauss-Legendre grid in theta with `nodes` points in total.
/// In-band `breakpoints` (energies) split the theta interval into panels so
/// that discontinuities of the integrand fall on panel edges; nodes are
/// distributed proportionally to the panel lengths (at least 4 per panel).
EnergyGrid make_theta_grid(double t_c, std::size_t nodes, std::span<const double> breakpoints = {});

/// Uniform composite grid: `panels` equal theta panels with `per_panel` nodes each.
EnergyGrid make_panel_grid(double t_c, std::size_t panels, std::size_t per_panel);

/// Composite Simpson integral of equally spaced samples (3/8 rule closes an
/// odd number of intervals).
double simpson(std::span<const double> f, double h);

}  // namespace nesslab

// Copyright 2026 The nesslab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <vector>

#include "nesslab/model.hpp"

namespace nesslab {

struct SampleEquilibrium {
  SampleMatrix rho_s;
  double mu_s = 0.0;
  std::size_t iterations = 0;
  double residual = 0.0;
  double mixing = 1.0;
  std::vector<double> contraction_ratios;  ///< successive residual ratios
};

/// Fermi matrix 1 / (e^{beta (h - mu)} + 1) of a Hermitian h.
SampleMatrix fermi_matrix(const SampleMatrix& h, double beta, double mu);

/// Unique mu with Tr f_FD(h_s + V{gamma}; beta_s, mu) = n_particles.
double solve_mu(const SampleMatrix& gamma, const SystemSpec& spec);

/// F(gamma) = f_FD(h_s + V{gamma}; beta_s, mu_s(gamma)).
SampleMatrix equilibrium_map(const SampleMatrix& gamma, const SystemSpec& spec);

struct EquilibriumOptions {
  double tol = 1e-12;
  std::size_t max_iterations = 1000;
  double mixing = 1.0;  ///< retried with 0.5 when plain iteration fails
};

/// Picard iteration of F from (n_particles / N) Id. Throws NoConvergence.
SampleEquilibrium solve_sample_equilibrium(const SystemSpec& spec, const EquilibriumOptions& options = {});

}  // namespace nesslab

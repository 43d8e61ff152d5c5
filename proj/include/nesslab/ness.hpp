// Copyright 2026 The nesslab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "nesslab/greens.hpp"
#include "nesslab/model.hpp"
#include "nesslab/quadrature.hpp"
#include "nesslab/scattering.hpp"

namespace nesslab {

struct NessOptions {
  std::size_t theta_nodes = 512;
  double tol = 1e-10;
  std::size_t max_sweeps = 500;
  double mixing = 1.0;
  double condition_threshold = kDefaultConditionThreshold;
  double lambda0 = 0.0;  ///< when positive, lambda >= lambda0 adds a warning
};

/// Theta grid with panel breaks at the reservoir chemical potentials, graded at mu +/- {2, 8, 32} kT
/// when 0 < kT <= 0.05 t_c.
EnergyGrid ness_grid(const SystemSpec& spec, std::size_t nodes);

/// Complex amplitudes indexed by (site n, channel sigma, grid node i); the
/// node index is contiguous.
class SpectralAmplitudes {
 public:
  SpectralAmplitudes() = default;
  SpectralAmplitudes(const EnergyGrid& grid, std::size_t dim);

  const EnergyGrid& grid() const { return grid_; }
  std::size_t dim() const { return dim_; }
  std::size_t nodes() const { return grid_.size(); }

  Complex& operator()(std::size_t n, int sigma, std::size_t i) { return values_[offset(n, sigma) + i]; }
  Complex operator()(std::size_t n, int sigma, std::size_t i) const { return values_[offset(n, sigma) + i]; }
  const Complex* channel(std::size_t n, int sigma) const { return values_.data() + offset(n, sigma); }

 private:
  std::size_t offset(std::size_t n, int sigma) const {
    return (n * 2 + static_cast<std::size_t>(sigma)) * grid_.size();
  }

  EnergyGrid grid_;
  std::size_t dim_ = 0;
  std::vector<Complex> values_;
};

/// Scattering data of H (without the Hartree term) on every grid node.
class NessProblem {
 public:
  NessProblem(SystemSpec spec, EnergyGrid grid, double condition_threshold = kDefaultConditionThreshold);

  const SystemSpec& spec() const { return spec_; }
  const EnergyGrid& grid() const { return grid_; }
  const ScatteringFrame& frame(std::size_t i) const { return frames_[i]; }
  /// w_i f_sigma(E_i)
  const std::vector<double>& reservoir_weights(int sigma) const {
    return reservoir_weights_[static_cast<std::size_t>(sigma)];
  }

  /// Free term <Psi^+_{sigma,E}, zeta_n> on the grid.
  SpectralAmplitudes free_amplitudes() const;
  /// c_k = sum_sigma int f_sigma |w_k|^2 dE
  RVector occupations(const SpectralAmplitudes& w) const;

 private:
  SystemSpec spec_;
  EnergyGrid grid_;
  std::vector<ScatteringFrame> frames_;
  std::array<std::vector<double>, 2> reservoir_weights_;
};

struct NessSolution {
  SpectralAmplitudes w;
  RVector c;          ///< converged occupations c_k
  RVector potential;  ///< lambda nu c, the diagonal of the steady Hartree term
  std::vector<double> residuals;
  std::size_t sweeps = 0;
  double contraction_ratio = 0.0;  ///< exp of the fitted log-residual slope
  std::vector<std::string> warnings;
};

/// Fixed point in the energy representation. Each sweep recomputes c from
/// the current amplitudes and then solves (I + conj(S^{-1}) diag(lambda nu c)) w = w0
/// node by node. Throws NoConvergence.
NessSolution solve_w(const NessProblem& problem, const NessOptions& options = {});

/// Outgoing spectral amplitude of a compact psi in the steady state:
/// <Psi^+, psi> - sum_j v_j y_j w_j with y the sample part of (H - E + i0)^{-1} psi.
Complex steady_amplitude(const NessProblem& problem, const NessSolution& sol, const CompactVector& psi, int sigma,
                         std::size_t node);

/// Interacting transmittance on the grid.
std::vector<double> steady_transmittance(const NessProblem& problem, const NessSolution& sol);

/// 2 pi int (f_2 - f_1) T dE; positive means net flow into lead 1.
double steady_current(const SystemSpec& spec, const EnergyGrid& grid, const std::vector<double>& transmittance);

/// <zeta_k, rho zeta_k> of the steady state.
RVector steady_occupations(const NessProblem& problem, const NessSolution& sol);

/// omega(|f><g|) = <g, rho f>.
Complex steady_expectation(const NessProblem& problem, const NessSolution& sol, const CompactVector& f,
                           const CompactVector& g);

struct EffectiveHamiltonian {
  RVector s;            ///< non-interacting steady occupations
  SampleMatrix V_eff;   ///< Hartree potential of those occupations
  SystemSpec spec_eff;  ///< h_s replaced by h_s + V_eff
};

EffectiveHamiltonian effective_hamiltonian(const NessProblem& problem);

struct EffectiveTransmittance {
  std::vector<double> via_t_matrix;  ///< |T_12|^2 with H_eff
  std::vector<double> via_waves;     ///< bilinear form in wave transforms of S_1 and L_1 under H_eff
};

EffectiveTransmittance effective_transmittance(const NessProblem& problem, const EffectiveHamiltonian& eff);

/// Tr(rho_eff |f><g|) with rho_eff the non-interacting steady state of H_eff.
Complex effective_expectation(const NessProblem& problem, const EffectiveHamiltonian& eff, const CompactVector& f,
                              const CompactVector& g);

struct MnResult {
  RVector n;
  RVector s;
  std::size_t iterations = 0;
  double distance_to_s = 0.0;
  RVector effective_occupations;  ///< <zeta_k, f_FD(H_lambda(s)) zeta_k>
};

/// Iterates n -> (1/pi) int f Im[(S(E) + lambda diag(nu n))^{-1}]_kk dE.
/// Throws NotEquilibrium for unequal reservoirs and NoConvergence.
MnResult mn_fixed_point(const NessProblem& problem, const NessOptions& options = {});

struct SteadyStateResult {
  NessSolution solution;
  RVector occupations;
  std::vector<double> transmittance;
  std::vector<double> transmittance0;
  std::vector<double> transmittance_eff;
  double current_1 = 0.0;
  double current_0 = 0.0;
  double current_eff = 0.0;
  EffectiveHamiltonian effective;
};

SteadyStateResult run_ness(const NessProblem& problem, const NessOptions& options = {});

}  // namespace nesslab

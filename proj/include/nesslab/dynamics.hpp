// Copyright 2026 The nesslab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <string>
#include <vector>

#include "nesslab/model.hpp"

namespace nesslab {

using DenseMatrix = Eigen::MatrixXcd;

/// rho_i = f_FD(h_1) + f_FD(h_2) + rho_s on the truncated space.
DenseMatrix initial_state_truncated(const SystemSpec& spec, std::size_t L, const SampleMatrix& rho_s);

struct EvolutionState {
  double t = 0.0;
  RVector occupations;
  double current = 0.0;  ///< <I_1> = -2 tau Im<L_1, rho S_1>
  double trace_defect = 0.0;
  double hermiticity_defect = 0.0;
  double unitarity_defect = 0.0;
};

/// <I_1> for a density matrix on the truncated space.
double current_1(const SystemSpec& spec, const TruncatedOperator& op, const DenseMatrix& rho);

/// e^{-itH} rho e^{itH} through a Hermitian eigendecomposition.
DenseMatrix exact_evolution(const DenseMatrix& H, const DenseMatrix& rho, double t);
DenseMatrix exact_propagator(const DenseMatrix& H, double t);

struct PicardOptions {
  double tol = 1e-13;             ///< sup-norm change of U between iterates
  std::size_t max_iterations = 200;
  double safety = 0.9;            ///< fraction of the admissible window used
  double window_override = 0.0;   ///< positive value forces the window width
};

struct PicardResult {
  DenseMatrix U;
  DenseMatrix rho;
  EvolutionState state;
  double window = 0.0;
  double admissible_window = 0.0;
  std::size_t windows = 0;
  double max_contraction_ratio = 0.0;
  std::size_t max_iterations_used = 0;
};

/// Builds U(t) window by window from U = U(t0) - i int G(U(s)) ds, with
/// G(U) = (H + V{U rho_i U*}) U and Simpson quadrature on sub-steps of size
/// at most dt. Throws WindowTooLarge when an iteration stops contracting.
PicardResult picard_propagator(const SystemSpec& spec, std::size_t L, const DenseMatrix& rho_i, double t_end,
                               double dt, const PicardOptions& options = {});

enum class LiouvilleMethod { Auto, Dense, Orbitals };

struct EvolveOptions {
  double output_stride = 0.0;  ///< 0 selects 0.5 / t_c
  LiouvilleMethod method = LiouvilleMethod::Auto;
  double orbital_cutoff = 1e-14;  ///< occupation below which an orbital is dropped
  bool keep_final = false;
};

struct Trajectory {
  std::vector<EvolutionState> states;
  double recurrence_horizon = 0.0;  ///< 0.8 L / (2 t_c)
  bool recurrence_warning = false;
  std::string method;
  std::size_t orbitals = 0;
  DenseMatrix final_rho;  ///< filled when keep_final is set
};

/// RK4 integration of i d/dt rho = [H + V{rho}, rho] on the truncated lattice.
/// The orbital form evolves rho = sum_m |chi_m><chi_m| and is chosen by Auto
/// when it needs fewer columns than the dense form.
Trajectory evolve_liouville(const SystemSpec& spec, std::size_t L, const DenseMatrix& rho_i, double t_end, double dt,
                            const EvolveOptions& options = {});

struct PlateauReport {
  RVector occupations;
  double current = 0.0;
  double drift = 0.0;  ///< relative change between the two halves of the window
};

/// Averages over the last `fraction` of the trajectory. Throws NoPlateau
/// when the relative drift exceeds `drift_tol`.
PlateauReport plateau(const Trajectory& trajectory, double fraction = 0.2, double drift_tol = 1e-3,
                      double current_scale = 0.0);

struct DiagnosticsReport {
  PlateauReport plateau;
  double ness_current = 0.0;
  RVector ness_occupations;
  double current_relative_error = 0.0;
  double occupation_deviation = 0.0;
  double rho_s_deviation = -1.0;  ///< plateau occupation gap between two initial samples, if given
};

DiagnosticsReport steady_diagnostics(const Trajectory& trajectory, double ness_current, const RVector& ness_occupations,
                                     const Trajectory* second_initialization = nullptr, double fraction = 0.2,
                                     double drift_tol = 1e-3);

}  // namespace nesslab

// Copyright 2026 The nesslab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstddef>
#include <vector>

#include "nesslab/greens.hpp"
#include "nesslab/model.hpp"

namespace nesslab {

/// Psi0_E(n) = sin((n + 1) theta) / sqrt(pi t_c sin theta), E = 2 t_c cos theta.
/// Throws std::domain_error outside the open band.
double lead_eigenfunction(std::size_t n, double E, double t_c);

/// (F f)(E) = sum_n Psi0_E(n) f(n).
Complex fourier_lead(const LeadVector& f, double E, double t_c);

/// Half-open range of lead sites [begin, end).
struct SiteWindow {
  std::size_t begin = 0;
  std::size_t end = 0;
};

struct GeneralizedEigenfunction {
  double E = 0.0;
  int lead = 0;  ///< 0 or 1
  Boundary sign = Boundary::Upper;  ///< Upper gives Psi^+, Lower gives Psi^-
  SiteWindow window;
  std::array<std::vector<Complex>, 2> lead_values;  ///< values on window sites of each lead
  CVector sample;
};

/// All stationary scattering data at one in-band energy.
class ScatteringFrame {
 public:
  ScatteringFrame(const SystemSpec& spec, double E, const SampleMatrix& extra_potential = SampleMatrix(),
                  double condition_threshold = kDefaultConditionThreshold);

  double energy() const { return resolvent_.energy(); }
  const Resolvent& resolvent() const { return resolvent_; }
  /// (F L_sigma)(E)
  Complex coupling_transform(int sigma) const { return fl_[static_cast<std::size_t>(sigma)]; }

  /// <Psi^+_{sigma,E}, psi>
  Complex wave_transform(const CompactVector& psi, int sigma) const;
  /// <Psi^+_{sigma,E}, zeta_n> = -tau (F L_sigma)(E) conj((S^{-1} S_sigma)_n)
  Complex sample_wave_transform(std::size_t n, int sigma) const;

  /// T_jk = -tau^2 (F L_j) conj(F L_k) <S_j, S^{-1} S_k>
  Eigen::Matrix2cd t_matrix() const;
  double transmittance0() const { return std::norm(t_matrix()(0, 1)); }

  GeneralizedEigenfunction lippmann_schwinger(int sigma, Boundary sign, SiteWindow window) const;

 private:
  double t_c_;
  double tau_;
  std::array<CVector, 2> S_;
  Resolvent resolvent_;
  std::array<Complex, 2> fl_;
  std::array<CVector, 2> sinv_s_;  ///< S(E + i0)^{-1} S_sigma
};

/// Psi^{+-}_{sigma,E} = Psi0 - (H - E -+ i0)^{-1} h_tau Psi0 on a window of lead sites.
GeneralizedEigenfunction lippmann_schwinger(double E, int sigma, Boundary sign, const SystemSpec& spec,
                                            SiteWindow window, const SampleMatrix& extra = SampleMatrix());

/// Largest |((H - E) Psi)(x)| over sites x whose full neighbourhood lies in the window.
double schrodinger_residual(const GeneralizedEigenfunction& psi, const SystemSpec& spec,
                            const SampleMatrix& extra = SampleMatrix());

Complex wave_transform(const CompactVector& psi, double E, int sigma, const SystemSpec& spec,
                       const SampleMatrix& extra = SampleMatrix());

Eigen::Matrix2cd t_matrix(double E, const SystemSpec& spec, const SampleMatrix& extra = SampleMatrix());

/// |T_12(E)|^2; zero outside the open band.
double transmittance0(double E, const SystemSpec& spec, const SampleMatrix& extra = SampleMatrix());

}  // namespace nesslab

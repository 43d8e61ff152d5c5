// Copyright 2026 The nesslab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "nesslab/model.hpp"
#include "nesslab/quadrature.hpp"

namespace nesslab {

inline constexpr double kDefaultConditionThreshold = 1e10;

/// Which boundary value of the resolvent: E + i0 (Upper) or E - i0 (Lower).
enum class Boundary { Upper, Lower };

/// <n|(Delta_D - E - i0)^{-1}|m> for real E on a semi-infinite chain with
/// hopping t_c. Real outside the band, continuous at the thresholds.
Complex dirichlet_green(std::size_t n, std::size_t m, double E, double t_c);

/// <n|(Delta_D - z)^{-1}|m> for z off the cut [-2 t_c, 2 t_c].
Complex dirichlet_green(std::size_t n, std::size_t m, Complex z, double t_c);

/// Full-line lattice Green function g(d) = <n|(Delta - z)^{-1}|n + d>.
/// Throws std::domain_error for z on the cut.
Complex full_line_green(long d, Complex z, double t_c);

/// <f|(Delta_D - E -+ i0)^{-1}|g> for finitely supported lead vectors.
Complex lead_form(const LeadVector& f, const LeadVector& g, double E, double t_c, Boundary b = Boundary::Upper);

/// Sigma_j(E) = <L|(h_j - E - i0)^{-1}|L>.
inline Complex lead_self_energy(const LeadVector& L, double E, double t_c) { return lead_form(L, L, E, t_c); }

struct SEMatrix {
  double E = 0.0;
  SampleMatrix matrix;
  std::array<Complex, 2> lead_selfenergy{};
};

/// S(E) = h_s + extra - E - tau^2 sum_j Sigma_j(E) |S_j><S_j|. An empty
/// `extra_potential` means none.
SEMatrix s_matrix(double E, const SystemSpec& spec, const SampleMatrix& extra_potential = SampleMatrix());

/// 2-norm condition number of a square matrix.
double condition_number(const SampleMatrix& m);

/// Boundary values of (H - E -+ i0)^{-1} at a fixed real energy, assembled
/// from S(E)^{-1} and closed-form lead Green functions.
class Resolvent {
 public:
  /// Throws SingularS if cond(S(E)) exceeds `condition_threshold`.
  Resolvent(const SystemSpec& spec, double E, const SampleMatrix& extra_potential = SampleMatrix(),
            double condition_threshold = kDefaultConditionThreshold);

  double energy() const { return E_; }
  double condition() const { return condition_; }
  const SEMatrix& s() const { return s_; }
  /// S(E + i0)^{-1}; the lower boundary value uses its adjoint.
  const SampleMatrix& s_inverse() const { return s_inv_; }
  SampleMatrix s_inverse(Boundary b) const { return b == Boundary::Upper ? s_inv_ : SampleMatrix(s_inv_.adjoint()); }

  Complex lead_green(std::size_t n, std::size_t m, Boundary b) const;

  /// Sample component of (H - E -+ i0)^{-1} psi.
  CVector sample_part(const CompactVector& psi, Boundary b) const;
  /// Component of (H - E -+ i0)^{-1} psi at site n of lead j (0 or 1).
  Complex lead_part(int j, std::size_t n, const CompactVector& psi, Boundary b) const;
  /// <f|(H - E -+ i0)^{-1}|g>.
  Complex element(const CompactVector& f, const CompactVector& g, Boundary b = Boundary::Upper) const;

 private:
  Complex lead_apply(const LeadVector& v, std::size_t n, Boundary b) const;

  double E_;
  double t_c_;
  double tau_;
  std::array<CVector, 2> S_;
  std::array<LeadVector, 2> L_;
  SEMatrix s_;
  SampleMatrix s_inv_;
  double condition_;
};

/// <f|(H - E - i0)^{-1}|g>.
Complex resolvent_H(double E, const SystemSpec& spec, const CompactVector& f, const CompactVector& g);

struct SpectralConditionReport {
  double margin = 0.0;  ///< min over energies of the smallest singular value of S(E)
  double argmin = 0.0;
  bool flagged = false;
  double flag_threshold = 0.0;
  std::vector<double> energies;
  std::vector<double> smallest_singular;
};

/// Smallest singular value of S(E).
double smallest_singular_value(double E, const SystemSpec& spec, const SampleMatrix& extra = SampleMatrix());

/// Uniform scan covering every energy at which H can have spectrum.
std::vector<double> default_condition_energies(const SystemSpec& spec, std::size_t points = 4001);

/// Scans the energies, then refines the minimum with Brent's method between
/// the neighbouring scan points. Flags margins below 1e-6 * max(1, t_c).
SpectralConditionReport spectral_condition_check(const SystemSpec& spec, std::span<const double> energies,
                                                 const SampleMatrix& extra = SampleMatrix());

/// Spectral density F_jn(E) of <zeta_j, e^{isH} zeta_n> = int F_jn(E) e^{isE} dE.
SampleMatrix spectral_density(double E, const SystemSpec& spec);

struct DispersiveOptions {
  double t_max = 0.0;           ///< 0 selects 200 / t_c
  double ds = 0.0;              ///< 0 selects 0.025 / t_c
  std::size_t panels = 128;     ///< base theta panels
  std::size_t per_panel = 16;   ///< Gauss-Legendre nodes per panel
  double refine_tol = 1e-11;    ///< adaptive panel split tolerance on tr F
  std::size_t max_depth = 14;
  double growth_limit = 2.0;    ///< allowed growth of s^{3/2}|amp| across the last decade
};

/// Grid adapted to the spectral density of the sample sites.
EnergyGrid adaptive_spectral_grid(const SystemSpec& spec, const DispersiveOptions& options = {});

/// Sample-site propagator amplitudes <zeta_j, e^{isH} zeta_n> at s = k * ds,
/// k = 0..steps-1; result[k] is the N x N matrix at that time.
std::vector<SampleMatrix> propagator_amplitudes(const SystemSpec& spec, const EnergyGrid& grid, double ds,
                                                std::size_t steps);

struct DispersiveReport {
  double M = 0.0;
  double lambda0 = 0.0;
  double t_max = 0.0;
  double tail_constant = 0.0;  ///< max over entries of sup s^{3/2}|amp| on the last decade
  double growth_ratio = 0.0;   ///< worst late/early window ratio of s^{3/2}|amp|
  RealMatrix integrals;        ///< int_0^{t_max} |amp_jn| ds
  std::vector<double> spectral_weight;  ///< int F_jj dE, equals 1 without bound states
  std::size_t grid_nodes = 0;
};

/// M = max_jn int_0^inf |<zeta_j, e^{isH} zeta_n>| ds (upper estimate with a
/// fitted s^{-3/2} tail) and lambda0 = 1 / (12 |nu|_1 M).
/// Throws NonDecayingPropagator when s^{3/2}|amp| grows over the last decade.
DispersiveReport dispersive_constants(const SystemSpec& spec, const DispersiveOptions& options = {});

}  // namespace nesslab

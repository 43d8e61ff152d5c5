// Copyright 2026 The nesslab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

namespace nesslab {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;

/// Dense N x N complex matrix on the sample space. Holds h_s, Hartree
/// potentials, S(E) values and sample density matrices.
using SampleMatrix = Eigen::MatrixXcd;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct SiteAmplitude {
  std::size_t site = 0;
  Complex amplitude{};
};

/// Finitely supported vector on one semi-infinite lead (sites 0, 1, ...).
using LeadVector = std::vector<SiteAmplitude>;

std::size_t max_site(const LeadVector& v);

/// Index of a lead: 0 for lead 1, 1 for lead 2.
enum class Lead : int { One = 0, Two = 1 };

/// A compactly supported vector of the full Hilbert space: a sample part
/// plus finitely supported parts on each lead. An empty sample part means zero.
struct CompactVector {
  CVector sample;
  LeadVector lead1;
  LeadVector lead2;

  static CompactVector sample_basis(std::size_t k, std::size_t dim);
  static CompactVector from_sample(const CVector& v);
  static CompactVector on_lead(Lead lead, LeadVector v);

  const LeadVector& lead(int j) const { return j == 0 ? lead1 : lead2; }
  Complex sample_at(Eigen::Index k) const { return sample.size() == 0 ? Complex{} : sample(k); }
};

struct SystemSpec {
  double t_c = 1.0;
  double tau = 0.1;
  SampleMatrix h_s;
  RealMatrix nu;
  double lambda = 0.0;
  CVector S1;
  CVector S2;
  LeadVector L1{{0, 1.0}};
  LeadVector L2{{0, 1.0}};
  double beta1 = kInfinity;
  double beta2 = kInfinity;
  double mu1 = 0.0;
  double mu2 = 0.0;
  double beta_s = 1.0;
  double n_particles = 0.5;

  std::size_t dim() const { return static_cast<std::size_t>(h_s.rows()); }
  const CVector& S(int j) const { return j == 0 ? S1 : S2; }
  const LeadVector& L(int j) const { return j == 0 ? L1 : L2; }
  double beta(int j) const { return j == 0 ? beta1 : beta2; }
  double mu(int j) const { return j == 0 ? mu1 : mu2; }
  bool equal_reservoirs() const { return beta1 == beta2 && mu1 == mu2; }

  /// Throws ConfigError when an invariant is violated.
  void validate() const;
};

/// Single-dot system: h_s = [[alpha]], S_1 = S_2 = zeta, L_j = delta_0, nu = [[1]].
SystemSpec single_dot(double alpha, double tau, double t_c = 1.0);

/// sum_{j,k} |nu_jk|
double nu_norm1(const RealMatrix& nu);

/// Diagonal of V_lambda for prescribed occupations: lambda * sum_k nu_jk n_k.
RVector hartree_diagonal(const RVector& occupations, const SystemSpec& spec);

/// V_lambda{gamma}: diagonal, entry j = lambda * sum_k nu_jk gamma_kk.
/// Rejects diagonals with an imaginary part above 1e-12.
SampleMatrix hartree_potential(const SampleMatrix& gamma, const SystemSpec& spec);

/// Fermi function; beta = infinity gives the step with value 1/2 at E = mu.
double fermi_dirac(double E, double beta, double mu);

/// Finite-volume matrix of H (leads cut after L sites, Dirichlet ends).
/// Global ordering: lead 1 sites 0..L-1, lead 2 sites 0..L-1, sample 0..N-1.
struct TruncatedOperator {
  std::size_t L = 0;
  std::size_t N = 0;
  Eigen::MatrixXcd matrix;

  std::size_t total_dim() const { return 2 * L + N; }
  std::size_t lead_index(int lead, std::size_t site) const { return static_cast<std::size_t>(lead) * L + site; }
  std::size_t sample_index(std::size_t k) const { return 2 * L + k; }
  /// Embeds a compact vector into the truncated space.
  CVector embed(const CompactVector& v) const;
};

TruncatedOperator assemble_truncated(const SystemSpec& spec, std::size_t L,
                                     const std::optional<SampleMatrix>& gamma = std::nullopt);

bool is_hermitian(const Eigen::MatrixXcd& m, double tol = 1e-12);

}  // namespace nesslab

// Copyright 2026 The nesslab Authors
// SPDX-License-Identifier: Apache-2.0

#include "nesslab/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "nesslab/errors.hpp"

namespace nesslab {

std::size_t max_site(const LeadVector& v) {
  std::size_t m = 0;
  for (const auto& e : v) m = std::max(m, e.site);
  return m;
}

CompactVector CompactVector::sample_basis(std::size_t k, std::size_t dim) {
  if (k >= dim) throw std::invalid_argument("sample basis index out of range");
  CompactVector v;
  v.sample = CVector::Zero(static_cast<Eigen::Index>(dim));
  v.sample(static_cast<Eigen::Index>(k)) = 1.0;
  return v;
}

CompactVector CompactVector::from_sample(const CVector& s) {
  CompactVector v;
  v.sample = s;
  return v;
}

CompactVector CompactVector::on_lead(Lead lead, LeadVector l) {
  CompactVector v;
  (lead == Lead::One ? v.lead1 : v.lead2) = std::move(l);
  return v;
}

namespace {

bool has_nonzero(const LeadVector& v) {
  return std::any_of(v.begin(), v.end(), [](const SiteAmplitude& e) { return std::abs(e.amplitude) > 0.0; });
}

}  // namespace

void SystemSpec::validate() const {
  const auto n = h_s.rows();
  if (n <= 0 || h_s.cols() != n) throw ConfigError("h_s must be a non-empty square matrix");
  if (!(t_c > 0.0)) throw ConfigError("t_c must be positive");
  if (!(tau >= 0.0)) throw ConfigError("tau must be nonnegative");
  if (!(lambda >= 0.0)) throw ConfigError("lambda must be nonnegative");
  const double scale = std::max(1.0, h_s.cwiseAbs().maxCoeff());
  if ((h_s - h_s.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * scale) throw ConfigError("h_s is not Hermitian");
  if (nu.rows() != n || nu.cols() != n) throw ConfigError("nu must be N x N");
  if (S1.size() != n || S2.size() != n) throw ConfigError("S1 and S2 must have N entries");
  if (S1.norm() == 0.0 || S2.norm() == 0.0) throw ConfigError("coupling vectors S1, S2 must be nonzero");
  if (!has_nonzero(L1) || !has_nonzero(L2)) throw ConfigError("lead vectors L1, L2 need a nonzero amplitude");
  if (!(beta1 > 0.0) || !(beta2 > 0.0)) throw ConfigError("reservoir beta must be positive or infinite");
  if (!std::isfinite(mu1) || !std::isfinite(mu2)) throw ConfigError("reservoir mu must be finite");
  if (!(beta_s > 0.0) || std::isinf(beta_s)) throw ConfigError("beta_s must be positive and finite");
  if (!(n_particles > 0.0 && n_particles < static_cast<double>(n)))
    throw ConfigError("n_particles must lie in (0, N)");
}

SystemSpec single_dot(double alpha, double tau, double t_c) {
  SystemSpec s;
  s.t_c = t_c;
  s.tau = tau;
  s.h_s = SampleMatrix::Constant(1, 1, alpha);
  s.nu = RealMatrix::Ones(1, 1);
  s.S1 = CVector::Ones(1);
  s.S2 = CVector::Ones(1);
  s.L1 = {{0, 1.0}};
  s.L2 = {{0, 1.0}};
  s.n_particles = 0.5;
  return s;
}

double nu_norm1(const RealMatrix& nu) { return nu.cwiseAbs().sum(); }

RVector hartree_diagonal(const RVector& occupations, const SystemSpec& spec) {
  if (occupations.size() != spec.nu.cols()) throw std::invalid_argument("occupation vector has wrong dimension");
  return spec.lambda * (spec.nu * occupations);
}

SampleMatrix hartree_potential(const SampleMatrix& gamma, const SystemSpec& spec) {
  const auto n = static_cast<Eigen::Index>(spec.dim());
  if (gamma.rows() != n || gamma.cols() != n) throw std::invalid_argument("density matrix has wrong dimension");
  RVector occ(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    if (std::abs(gamma(k, k).imag()) > 1e-12)
      throw std::invalid_argument("density matrix diagonal has an imaginary part");
    occ(k) = gamma(k, k).real();
  }
  return hartree_diagonal(occ, spec).cast<Complex>().asDiagonal();
}

double fermi_dirac(double E, double beta, double mu) {
  if (std::isinf(beta)) {
    if (E < mu) return 1.0;
    if (E > mu) return 0.0;
    return 0.5;
  }
  const double x = beta * (E - mu);
  const double e = std::exp(-std::abs(x));
  return x >= 0.0 ? e / (1.0 + e) : 1.0 / (1.0 + e);
}

CVector TruncatedOperator::embed(const CompactVector& v) const {
  CVector out = CVector::Zero(static_cast<Eigen::Index>(total_dim()));
  for (int j = 0; j < 2; ++j) {
    for (const auto& e : v.lead(j)) {
      if (e.site >= L) throw std::invalid_argument("lead support exceeds truncation length");
      out(static_cast<Eigen::Index>(lead_index(j, e.site))) += e.amplitude;
    }
  }
  if (v.sample.size() != 0) {
    if (static_cast<std::size_t>(v.sample.size()) != N) throw std::invalid_argument("sample part has wrong dimension");
    out.tail(static_cast<Eigen::Index>(N)) = v.sample;
  }
  return out;
}

TruncatedOperator assemble_truncated(const SystemSpec& spec, std::size_t L, const std::optional<SampleMatrix>& gamma) {
  const std::size_t support = std::max(max_site(spec.L1), max_site(spec.L2));
  if (L <= support) {
    throw std::invalid_argument("truncation length " + std::to_string(L) + " does not cover lead support up to site " +
                                std::to_string(support));
  }
  TruncatedOperator op;
  op.L = L;
  op.N = spec.dim();
  const auto dim = static_cast<Eigen::Index>(op.total_dim());
  op.matrix = Eigen::MatrixXcd::Zero(dim, dim);
  for (int j = 0; j < 2; ++j) {
    for (std::size_t n = 0; n + 1 < L; ++n) {
      const auto a = static_cast<Eigen::Index>(op.lead_index(j, n));
      op.matrix(a, a + 1) = spec.t_c;
      op.matrix(a + 1, a) = spec.t_c;
    }
  }
  const auto s0 = static_cast<Eigen::Index>(op.sample_index(0));
  const auto n = static_cast<Eigen::Index>(op.N);
  op.matrix.block(s0, s0, n, n) = spec.h_s;
  if (gamma) op.matrix.block(s0, s0, n, n) += hartree_potential(*gamma, spec);
  // tau * (|S_j><L_j| + |L_j><S_j|)
  for (int j = 0; j < 2; ++j) {
    const CVector& S = spec.S(j);
    for (const auto& e : spec.L(j)) {
      const auto a = static_cast<Eigen::Index>(op.lead_index(j, e.site));
      for (Eigen::Index k = 0; k < n; ++k) {
        const Complex v = spec.tau * S(k) * std::conj(e.amplitude);
        op.matrix(s0 + k, a) += v;
        op.matrix(a, s0 + k) += std::conj(v);
      }
    }
  }
  return op;
}

bool is_hermitian(const Eigen::MatrixXcd& m, double tol) {
  if (m.rows() != m.cols()) return false;
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

}  // namespace nesslab

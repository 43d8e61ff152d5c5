// Copyright 2026 The nesslab Authors
// SPDX-License-Identifier: Apache-2.0

#include "nesslab/equilibrium.hpp"

#include <boost/math/tools/roots.hpp>

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include "nesslab/errors.hpp"

namespace nesslab {

namespace {

double trace_at(const RVector& eig, double beta, double mu) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < eig.size(); ++i) s += fermi_dirac(eig(i), beta, mu);
  return s;
}

SampleMatrix effective_sample(const SampleMatrix& gamma, const SystemSpec& spec) {
  return spec.h_s + hartree_potential(gamma, spec);
}

double solve_mu_eigs(const RVector& eig, const SystemSpec& spec) {
  const double beta = spec.beta_s;
  const double lo = eig.minCoeff() - 50.0 / beta;
  const double hi = eig.maxCoeff() + 50.0 / beta;
  auto f = [&](double mu) { return trace_at(eig, beta, mu) - spec.n_particles; };
  std::uintmax_t iters = 200;
  const auto [a, b] = boost::math::tools::toms748_solve(f, lo, hi, boost::math::tools::eps_tolerance<double>(52), iters);
  return 0.5 * (a + b);
}

}  // namespace

SampleMatrix fermi_matrix(const SampleMatrix& h, double beta, double mu) {
  const Eigen::SelfAdjointEigenSolver<SampleMatrix> es(h);
  RVector occ(es.eigenvalues().size());
  for (Eigen::Index i = 0; i < occ.size(); ++i) occ(i) = fermi_dirac(es.eigenvalues()(i), beta, mu);
  return es.eigenvectors() * occ.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
}

double solve_mu(const SampleMatrix& gamma, const SystemSpec& spec) {
  const double n = static_cast<double>(spec.dim());
  if (!(spec.n_particles > 0.0 && spec.n_particles < n)) throw ConfigError("n_particles must lie in (0, N)");
  const Eigen::SelfAdjointEigenSolver<SampleMatrix> es(effective_sample(gamma, spec), Eigen::EigenvaluesOnly);
  return solve_mu_eigs(es.eigenvalues(), spec);
}

SampleMatrix equilibrium_map(const SampleMatrix& gamma, const SystemSpec& spec) {
  const SampleMatrix h = effective_sample(gamma, spec);
  const Eigen::SelfAdjointEigenSolver<SampleMatrix> es(h);
  const double mu = solve_mu_eigs(es.eigenvalues(), spec);
  RVector occ(es.eigenvalues().size());
  for (Eigen::Index i = 0; i < occ.size(); ++i) occ(i) = fermi_dirac(es.eigenvalues()(i), spec.beta_s, mu);
  return es.eigenvectors() * occ.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
}

namespace {

bool iterate(const SystemSpec& spec, const EquilibriumOptions& options, double mixing, SampleEquilibrium& out) {
  const auto n = static_cast<Eigen::Index>(spec.dim());
  SampleMatrix gamma = SampleMatrix::Identity(n, n) * (spec.n_particles / static_cast<double>(n));
  out = SampleEquilibrium{};
  out.mixing = mixing;
  double previous = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k <= options.max_iterations; ++k) {
    const SampleMatrix next = equilibrium_map(gamma, spec);
    const double residual = (next - gamma).norm();
    if (std::isfinite(previous) && previous > 0.0) out.contraction_ratios.push_back(residual / previous);
    previous = residual;
    gamma = mixing == 1.0 ? next : SampleMatrix((1.0 - mixing) * gamma + mixing * next);
    // Hermitize against round-off drift.
    gamma = 0.5 * (gamma + gamma.adjoint()).eval();
    out.iterations = k;
    out.residual = residual;
    if (residual < options.tol) {
      out.rho_s = equilibrium_map(gamma, spec);
      out.mu_s = solve_mu(gamma, spec);
      return true;
    }
    if (!std::isfinite(residual)) return false;
  }
  return false;
}

}  // namespace

SampleEquilibrium solve_sample_equilibrium(const SystemSpec& spec, const EquilibriumOptions& options) {
  spec.validate();
  SampleEquilibrium out;
  if (iterate(spec, options, options.mixing, out)) return out;
  if (options.mixing != 0.5 && iterate(spec, options, 0.5, out)) return out;
  throw NoConvergence("sample equilibrium did not converge: residual " + std::to_string(out.residual) + " after " +
                      std::to_string(out.iterations) + " iterations");
}

}  // namespace nesslab

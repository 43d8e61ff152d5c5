// Copyright 2026 The nesslab Authors
// SPDX-License-Identifier: Apache-2.0

#include "nesslab/ness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "nesslab/errors.hpp"
#include "nesslab/kernels.hpp"

namespace nesslab {

EnergyGrid ness_grid(const SystemSpec& spec, std::size_t nodes) {
  std::vector<double> cuts{spec.mu1, spec.mu2};
  // A sharp but smooth Fermi edge gets graded panels so that kT is resolved.
  for (int j = 0; j < 2; ++j) {
    const double kT = 1.0 / spec.beta(j);
    if (!(kT > 0.0) || kT > 0.05 * spec.t_c) continue;
    for (double k : {2.0, 8.0, 32.0}) {
      if (k * kT > 0.5 * spec.t_c) break;
      cuts.push_back(spec.mu(j) - k * kT);
      cuts.push_back(spec.mu(j) + k * kT);
    }
  }
  return make_theta_grid(spec.t_c, nodes, cuts);
}

SpectralAmplitudes::SpectralAmplitudes(const EnergyGrid& grid, std::size_t dim)
    : grid_(grid), dim_(dim), values_(dim * 2 * grid.size()) {}

NessProblem::NessProblem(SystemSpec spec, EnergyGrid grid, double condition_threshold)
    : spec_(std::move(spec)), grid_(std::move(grid)) {
  spec_.validate();
  frames_.reserve(grid_.size());
  for (double E : grid_.energy) frames_.emplace_back(spec_, E, SampleMatrix(), condition_threshold);
  for (int s = 0; s < 2; ++s) {
    auto& w = reservoir_weights_[static_cast<std::size_t>(s)];
    w.resize(grid_.size());
    for (std::size_t i = 0; i < grid_.size(); ++i)
      w[i] = grid_.weight[i] * fermi_dirac(grid_.energy[i], spec_.beta(s), spec_.mu(s));
  }
}

SpectralAmplitudes NessProblem::free_amplitudes() const {
  SpectralAmplitudes w(grid_, spec_.dim());
  for (std::size_t n = 0; n < spec_.dim(); ++n)
    for (int s = 0; s < 2; ++s)
      for (std::size_t i = 0; i < grid_.size(); ++i) w(n, s, i) = frames_[i].sample_wave_transform(n, s);
  return w;
}

RVector NessProblem::occupations(const SpectralAmplitudes& w) const {
  RVector c(static_cast<Eigen::Index>(spec_.dim()));
  for (std::size_t k = 0; k < spec_.dim(); ++k) {
    double sum = 0.0;
    for (int s = 0; s < 2; ++s)
      sum += kernels::weighted_abs2(grid_.size(), reservoir_weights(s).data(), w.channel(k, s));
    c(static_cast<Eigen::Index>(k)) = sum;
  }
  return c;
}

namespace {

// (I + conj(S^{-1}) diag(v)) w = w0 at every node and channel.
void solve_nodes(const NessProblem& problem, const SpectralAmplitudes& free, const RVector& v,
                 SpectralAmplitudes& w) {
  const auto N = static_cast<Eigen::Index>(problem.spec().dim());
  SampleMatrix m(N, N);
  CVector rhs(N);
  for (std::size_t i = 0; i < problem.grid().size(); ++i) {
    m = problem.frame(i).resolvent().s_inverse().conjugate() * v.cast<Complex>().asDiagonal();
    m.diagonal().array() += 1.0;
    const Eigen::PartialPivLU<SampleMatrix> lu(m);
    for (int s = 0; s < 2; ++s) {
      for (Eigen::Index n = 0; n < N; ++n) rhs(n) = free(static_cast<std::size_t>(n), s, i);
      const CVector x = lu.solve(rhs);
      for (Eigen::Index n = 0; n < N; ++n) w(static_cast<std::size_t>(n), s, i) = x(n);
    }
  }
}

double fitted_ratio(const std::vector<double>& r, double floor) {
  std::vector<double> xs;
  std::vector<double> ys;
  for (std::size_t k = 0; k < r.size(); ++k) {
    if (r[k] > floor) {
      xs.push_back(static_cast<double>(k));
      ys.push_back(std::log(r[k]));
    }
  }
  if (xs.size() < 2) return 0.0;
  const double n = static_cast<double>(xs.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    sx += xs[k];
    sy += ys[k];
    sxx += xs[k] * xs[k];
    sxy += xs[k] * ys[k];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return std::exp(slope);
}

}  // namespace

NessSolution solve_w(const NessProblem& problem, const NessOptions& options) {
  const SystemSpec& spec = problem.spec();
  if (!(options.mixing > 0.0 && options.mixing <= 1.0)) throw std::invalid_argument("mixing must lie in (0, 1]");
  const SpectralAmplitudes free = problem.free_amplitudes();
  NessSolution sol;
  if (options.lambda0 > 0.0 && spec.lambda >= options.lambda0) {
    std::ostringstream os;
    os << "lambda=" << spec.lambda << " is not below lambda0=" << options.lambda0
       << "; contraction is not guaranteed";
    sol.warnings.push_back(os.str());
  }
  sol.w = free;
  RVector c = problem.occupations(free);
  std::size_t growing = 0;
  for (std::size_t k = 1; k <= options.max_sweeps; ++k) {
    const RVector v = hartree_diagonal(c, spec);
    solve_nodes(problem, free, v, sol.w);
    const RVector c_new = problem.occupations(sol.w);
    const double residual = (c_new - c).cwiseAbs().maxCoeff();
    c = options.mixing == 1.0 ? c_new : RVector((1.0 - options.mixing) * c + options.mixing * c_new);
    sol.residuals.push_back(residual);
    sol.sweeps = k;
    if (!std::isfinite(residual)) throw NoConvergence("steady-state iteration produced non-finite occupations");
    if (residual < options.tol) break;
    growing = (sol.residuals.size() > 1 && residual > sol.residuals[sol.residuals.size() - 2]) ? growing + 1 : 0;
    if (growing >= 20) {
      throw NoConvergence("steady-state iteration diverges: residual grew for 20 consecutive sweeps (" +
                          std::to_string(residual) + ")");
    }
    if (k == options.max_sweeps) {
      throw NoConvergence("steady-state iteration stalled at residual " + std::to_string(residual) + " after " +
                          std::to_string(k) + " sweeps");
    }
  }
  if (options.mixing != 1.0) solve_nodes(problem, free, hartree_diagonal(c, spec), sol.w);
  sol.c = problem.occupations(sol.w);
  sol.potential = hartree_diagonal(c, spec);
  sol.contraction_ratio = fitted_ratio(sol.residuals, 1e3 * std::numeric_limits<double>::epsilon());
  return sol;
}

Complex steady_amplitude(const NessProblem& problem, const NessSolution& sol, const CompactVector& psi, int sigma,
                         std::size_t node) {
  const ScatteringFrame& f = problem.frame(node);
  Complex u = f.wave_transform(psi, sigma);
  if (sol.potential.size() == 0 || sol.potential.isZero(0.0)) return u;
  const CVector y = f.resolvent().sample_part(psi, Boundary::Lower);
  for (Eigen::Index j = 0; j < y.size(); ++j)
    u -= sol.potential(j) * y(j) * sol.w(static_cast<std::size_t>(j), sigma, node);
  return u;
}

namespace {

// -tau Im(a conj(b)) / pi, the two-channel combination of S_1 and L_1 amplitudes.
double transmittance_from_amplitudes(double tau, Complex a, Complex b) {
  return -tau * (a * std::conj(b)).imag() / std::numbers::pi;
}

}  // namespace

std::vector<double> steady_transmittance(const NessProblem& problem, const NessSolution& sol) {
  const SystemSpec& spec = problem.spec();
  const CompactVector s1 = CompactVector::from_sample(spec.S1);
  const CompactVector l1 = CompactVector::on_lead(Lead::One, spec.L1);
  std::vector<double> t(problem.grid().size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    const Complex a = steady_amplitude(problem, sol, s1, 1, i);
    const Complex b = steady_amplitude(problem, sol, l1, 1, i);
    t[i] = transmittance_from_amplitudes(spec.tau, a, b);
  }
  return t;
}

double steady_current(const SystemSpec& spec, const EnergyGrid& grid, const std::vector<double>& transmittance) {
  if (transmittance.size() != grid.size()) throw std::invalid_argument("transmittance does not match grid");
  double s = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double E = grid.energy[i];
    const double window = fermi_dirac(E, spec.beta2, spec.mu2) - fermi_dirac(E, spec.beta1, spec.mu1);
    s += grid.weight[i] * window * transmittance[i];
  }
  return 2.0 * std::numbers::pi * s;
}

RVector steady_occupations(const NessProblem& problem, const NessSolution& sol) {
  const std::size_t N = problem.spec().dim();
  RVector n(static_cast<Eigen::Index>(N));
  for (std::size_t k = 0; k < N; ++k) {
    const CompactVector z = CompactVector::sample_basis(k, N);
    double sum = 0.0;
    for (int s = 0; s < 2; ++s)
      for (std::size_t i = 0; i < problem.grid().size(); ++i)
        sum += problem.reservoir_weights(s)[i] * std::norm(steady_amplitude(problem, sol, z, s, i));
    n(static_cast<Eigen::Index>(k)) = sum;
  }
  return n;
}

Complex steady_expectation(const NessProblem& problem, const NessSolution& sol, const CompactVector& f,
                           const CompactVector& g) {
  Complex sum{};
  for (int s = 0; s < 2; ++s)
    for (std::size_t i = 0; i < problem.grid().size(); ++i)
      sum += problem.reservoir_weights(s)[i] * std::conj(steady_amplitude(problem, sol, g, s, i)) *
             steady_amplitude(problem, sol, f, s, i);
  return sum;
}

EffectiveHamiltonian effective_hamiltonian(const NessProblem& problem) {
  EffectiveHamiltonian eff;
  eff.s = problem.occupations(problem.free_amplitudes());
  eff.V_eff = hartree_diagonal(eff.s, problem.spec()).cast<Complex>().asDiagonal();
  eff.spec_eff = problem.spec();
  eff.spec_eff.h_s += eff.V_eff;
  return eff;
}

EffectiveTransmittance effective_transmittance(const NessProblem& problem, const EffectiveHamiltonian& eff) {
  const SystemSpec& spec = eff.spec_eff;
  const CompactVector s1 = CompactVector::from_sample(spec.S1);
  const CompactVector l1 = CompactVector::on_lead(Lead::One, spec.L1);
  EffectiveTransmittance out;
  const auto& grid = problem.grid();
  out.via_t_matrix.resize(grid.size());
  out.via_waves.resize(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const ScatteringFrame f(spec, grid.energy[i]);
    out.via_t_matrix[i] = f.transmittance0();
    out.via_waves[i] = transmittance_from_amplitudes(spec.tau, f.wave_transform(s1, 1), f.wave_transform(l1, 1));
  }
  return out;
}

Complex effective_expectation(const NessProblem& problem, const EffectiveHamiltonian& eff, const CompactVector& f,
                              const CompactVector& g) {
  Complex sum{};
  const auto& grid = problem.grid();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const ScatteringFrame frame(eff.spec_eff, grid.energy[i]);
    for (int s = 0; s < 2; ++s)
      sum += problem.reservoir_weights(s)[i] * std::conj(frame.wave_transform(g, s)) * frame.wave_transform(f, s);
  }
  return sum;
}

namespace {

RVector mn_map(const NessProblem& problem, const RVector& n) {
  const SystemSpec& spec = problem.spec();
  const auto N = static_cast<Eigen::Index>(spec.dim());
  const RVector v = hartree_diagonal(n, spec);
  RVector out = RVector::Zero(N);
  for (std::size_t i = 0; i < problem.grid().size(); ++i) {
    SampleMatrix m = problem.frame(i).resolvent().s().matrix;
    m.diagonal() += v.cast<Complex>();
    const SampleMatrix inv = m.partialPivLu().inverse();
    // Equal reservoirs: either weight carries the common Fermi factor.
    const double w = problem.reservoir_weights(0)[i];
    for (Eigen::Index k = 0; k < N; ++k) out(k) += w * inv(k, k).imag();
  }
  return out / std::numbers::pi;
}

}  // namespace

MnResult mn_fixed_point(const NessProblem& problem, const NessOptions& options) {
  const SystemSpec& spec = problem.spec();
  if (!spec.equal_reservoirs()) {
    throw NotEquilibrium("the occupation fixed point requires equal reservoir temperatures and chemical potentials");
  }
  MnResult r;
  r.s = problem.occupations(problem.free_amplitudes());
  RVector n = r.s;
  for (std::size_t k = 1;; ++k) {
    const RVector next = mn_map(problem, n);
    const double residual = (next - n).cwiseAbs().maxCoeff();
    n = next;
    r.iterations = k;
    if (residual < options.tol) break;
    if (!std::isfinite(residual) || k >= options.max_sweeps) {
      throw NoConvergence("occupation fixed point did not converge: residual " + std::to_string(residual));
    }
  }
  r.n = n;
  r.distance_to_s = (r.n - r.s).cwiseAbs().maxCoeff();
  r.effective_occupations = mn_map(problem, r.s);
  return r;
}

SteadyStateResult run_ness(const NessProblem& problem, const NessOptions& options) {
  SteadyStateResult r;
  r.solution = solve_w(problem, options);
  r.occupations = steady_occupations(problem, r.solution);
  r.transmittance = steady_transmittance(problem, r.solution);
  const auto& grid = problem.grid();
  r.transmittance0.resize(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) r.transmittance0[i] = problem.frame(i).transmittance0();
  r.effective = effective_hamiltonian(problem);
  r.transmittance_eff = effective_transmittance(problem, r.effective).via_t_matrix;
  const SystemSpec& spec = problem.spec();
  r.current_1 = steady_current(spec, grid, r.transmittance);
  r.current_0 = steady_current(spec, grid, r.transmittance0);
  r.current_eff = steady_current(spec, grid, r.transmittance_eff);
  return r;
}

}  // namespace nesslab

// Copyright 2026 The nesslab Authors
// SPDX-License-Identifier: Apache-2.0

#include "nesslab/greens.hpp"

#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "nesslab/errors.hpp"
#include "nesslab/kernels.hpp"

namespace nesslab {

namespace {

constexpr Complex kI{0.0, 1.0};

double parity(std::size_t n, std::size_t m) { return (n + m) % 2 == 0 ? 1.0 : -1.0; }

// Green function for E >= 0, written so that no cancellation occurs near the
// thresholds: p = min(n, m) + 1, q = max(n, m) + 1.
Complex green_nonnegative(std::size_t n, std::size_t m, double E, double t_c) {
  const auto p = static_cast<double>(std::min(n, m) + 1);
  const auto q = static_cast<double>(std::max(n, m) + 1);
  if (E == 2.0 * t_c) return -p / t_c;
  if (E < 2.0 * t_c) {
    const double theta = 2.0 * std::asin(std::sqrt((2.0 * t_c - E) / (4.0 * t_c)));
    return -std::exp(-kI * theta * q) * std::sin(p * theta) / (t_c * std::sin(theta));
  }
  const double kappa = 2.0 * std::asinh(std::sqrt((E - 2.0 * t_c) / (4.0 * t_c)));
  return std::exp(-kappa * (q - p)) * std::expm1(-2.0 * p * kappa) / (2.0 * t_c * std::sinh(kappa));
}

}  // namespace

Complex dirichlet_green(std::size_t n, std::size_t m, double E, double t_c) {
  if (E >= 0.0) return green_nonnegative(n, m, E, t_c);
  // Sublattice symmetry (-1)^n maps Delta_D to -Delta_D.
  const Complex mirrored = green_nonnegative(n, m, -E, t_c);
  if (E >= -2.0 * t_c) return -parity(n, m) * std::conj(mirrored);
  return -parity(n, m) * mirrored;
}

Complex dirichlet_green(std::size_t n, std::size_t m, Complex z, double t_c) {
  if (z.imag() == 0.0) return dirichlet_green(n, m, z.real(), t_c);
  Complex theta = std::acos(z / (2.0 * t_c));
  if (theta.imag() > 0.0) theta = -theta;
  const double s = static_cast<double>(n + m + 2);
  const double d = static_cast<double>(n > m ? n - m : m - n);
  return (std::exp(-kI * theta * s) - std::exp(-kI * theta * d)) / (2.0 * kI * t_c * std::sin(theta));
}

Complex full_line_green(long d, Complex z, double t_c) {
  if (z.imag() == 0.0 && std::abs(z.real()) <= 2.0 * t_c) {
    throw std::domain_error("full_line_green evaluated on the spectral cut");
  }
  // Roots of x^2 - (z / t_c) x + 1; the larger one is computed first.
  const Complex zeta = z / t_c;
  const Complex root = std::sqrt(zeta * zeta - 4.0);
  const Complex big = std::abs(zeta + root) >= std::abs(zeta - root) ? 0.5 * (zeta + root) : 0.5 * (zeta - root);
  const Complex small = 1.0 / big;
  return std::pow(small, static_cast<double>(std::labs(d))) / (t_c * (small - big));
}

Complex lead_form(const LeadVector& f, const LeadVector& g, double E, double t_c, Boundary b) {
  Complex s{};
  for (const auto& a : f) {
    for (const auto& c : g) {
      Complex gr = dirichlet_green(a.site, c.site, E, t_c);
      if (b == Boundary::Lower) gr = std::conj(gr);
      s += std::conj(a.amplitude) * gr * c.amplitude;
    }
  }
  return s;
}

SEMatrix s_matrix(double E, const SystemSpec& spec, const SampleMatrix& extra_potential) {
  const auto n = static_cast<Eigen::Index>(spec.dim());
  SEMatrix out;
  out.E = E;
  out.matrix = spec.h_s;
  if (extra_potential.size() != 0) {
    if (extra_potential.rows() != n || extra_potential.cols() != n)
      throw std::invalid_argument("extra potential has wrong dimension");
    out.matrix += extra_potential;
  }
  out.matrix.diagonal().array() -= E;
  const double tau2 = spec.tau * spec.tau;
  for (int j = 0; j < 2; ++j) {
    out.lead_selfenergy[static_cast<std::size_t>(j)] = lead_self_energy(spec.L(j), E, spec.t_c);
    out.matrix -= tau2 * out.lead_selfenergy[static_cast<std::size_t>(j)] * spec.S(j) * spec.S(j).adjoint();
  }
  return out;
}

double condition_number(const SampleMatrix& m) {
  const Eigen::JacobiSVD<SampleMatrix> svd(m);
  const auto& sv = svd.singularValues();
  const double lo = sv.minCoeff();
  if (lo == 0.0) return std::numeric_limits<double>::infinity();
  return sv.maxCoeff() / lo;
}

Resolvent::Resolvent(const SystemSpec& spec, double E, const SampleMatrix& extra_potential, double condition_threshold)
    : E_(E),
      t_c_(spec.t_c),
      tau_(spec.tau),
      S_{spec.S1, spec.S2},
      L_{spec.L1, spec.L2},
      s_(s_matrix(E, spec, extra_potential)) {
  condition_ = condition_number(s_.matrix);
  if (!(condition_ <= condition_threshold)) throw SingularS(E, condition_);
  s_inv_ = s_.matrix.partialPivLu().inverse();
}

Complex Resolvent::lead_green(std::size_t n, std::size_t m, Boundary b) const {
  const Complex g = dirichlet_green(n, m, E_, t_c_);
  return b == Boundary::Upper ? g : std::conj(g);
}

Complex Resolvent::lead_apply(const LeadVector& v, std::size_t n, Boundary b) const {
  Complex s{};
  for (const auto& e : v) s += lead_green(n, e.site, b) * e.amplitude;
  return s;
}

CVector Resolvent::sample_part(const CompactVector& psi, Boundary b) const {
  const auto n = s_inv_.rows();
  CVector rhs = psi.sample.size() == 0 ? CVector(CVector::Zero(n)) : psi.sample;
  if (rhs.size() != n) throw std::invalid_argument("sample part has wrong dimension");
  for (int j = 0; j < 2; ++j) {
    const LeadVector& pj = psi.lead(j);
    if (pj.empty()) continue;
    Complex form{};
    for (const auto& l : L_[static_cast<std::size_t>(j)]) form += std::conj(l.amplitude) * lead_apply(pj, l.site, b);
    rhs -= tau_ * form * S_[static_cast<std::size_t>(j)];
  }
  return b == Boundary::Upper ? CVector(s_inv_ * rhs) : CVector(s_inv_.adjoint() * rhs);
}

Complex Resolvent::lead_part(int j, std::size_t n, const CompactVector& psi, Boundary b) const {
  const CVector x = sample_part(psi, b);
  const auto jj = static_cast<std::size_t>(j);
  return lead_apply(psi.lead(j), n, b) - tau_ * lead_apply(L_[jj], n, b) * S_[jj].dot(x);
}

Complex Resolvent::element(const CompactVector& f, const CompactVector& g, Boundary b) const {
  const CVector x = sample_part(g, b);
  Complex s{};
  if (f.sample.size() != 0) s += f.sample.dot(x);
  for (int j = 0; j < 2; ++j) {
    const LeadVector& fj = f.lead(j);
    if (fj.empty()) continue;
    const auto jj = static_cast<std::size_t>(j);
    const Complex sx = S_[jj].dot(x);
    for (const auto& e : fj) {
      const Complex value = lead_apply(g.lead(j), e.site, b) - tau_ * lead_apply(L_[jj], e.site, b) * sx;
      s += std::conj(e.amplitude) * value;
    }
  }
  return s;
}

Complex resolvent_H(double E, const SystemSpec& spec, const CompactVector& f, const CompactVector& g) {
  return Resolvent(spec, E).element(f, g, Boundary::Upper);
}

double smallest_singular_value(double E, const SystemSpec& spec, const SampleMatrix& extra) {
  const Eigen::JacobiSVD<SampleMatrix> svd(s_matrix(E, spec, extra).matrix);
  return svd.singularValues().minCoeff();
}

std::vector<double> default_condition_energies(const SystemSpec& spec, std::size_t points) {
  if (points < 2) throw std::invalid_argument("need at least two scan points");
  double coupling = 0.0;
  for (int j = 0; j < 2; ++j) {
    double l = 0.0;
    for (const auto& e : spec.L(j)) l += std::norm(e.amplitude);
    coupling += 2.0 * spec.tau * spec.S(j).norm() * std::sqrt(l);
  }
  const double hs = spec.h_s.size() ? Eigen::SelfAdjointEigenSolver<SampleMatrix>(spec.h_s).eigenvalues().cwiseAbs().maxCoeff() : 0.0;
  const double reach = std::max(2.0 * spec.t_c + hs + coupling, 3.0 * spec.t_c) * 1.05;
  std::vector<double> e(points);
  for (std::size_t i = 0; i < points; ++i) e[i] = -reach + 2.0 * reach * static_cast<double>(i) / static_cast<double>(points - 1);
  return e;
}

SpectralConditionReport spectral_condition_check(const SystemSpec& spec, std::span<const double> energies,
                                                 const SampleMatrix& extra) {
  if (energies.empty()) throw std::invalid_argument("empty energy list");
  SpectralConditionReport r;
  r.energies.assign(energies.begin(), energies.end());
  std::sort(r.energies.begin(), r.energies.end());
  r.smallest_singular.reserve(r.energies.size());
  std::size_t best = 0;
  for (std::size_t i = 0; i < r.energies.size(); ++i) {
    r.smallest_singular.push_back(smallest_singular_value(r.energies[i], spec, extra));
    if (r.smallest_singular[i] < r.smallest_singular[best]) best = i;
  }
  r.margin = r.smallest_singular[best];
  r.argmin = r.energies[best];
  if (r.energies.size() > 1) {
    const double a = r.energies[best == 0 ? 0 : best - 1];
    const double b = r.energies[std::min(best + 1, r.energies.size() - 1)];
    if (b > a) {
      auto f = [&](double E) { return smallest_singular_value(E, spec, extra); };
      const auto [x, fx] = boost::math::tools::brent_find_minima(f, a, b, std::numeric_limits<double>::digits / 2);
      if (fx < r.margin) {
        r.margin = fx;
        r.argmin = x;
      }
    }
  }
  r.flag_threshold = 1e-6 * std::max(1.0, spec.t_c);
  r.flagged = r.margin < r.flag_threshold;
  return r;
}

SampleMatrix spectral_density(double E, const SystemSpec& spec) {
  const SampleMatrix a = s_matrix(E, spec).matrix.partialPivLu().inverse();
  return (a - a.adjoint()) / Complex(0.0, 2.0 * std::numbers::pi);
}

namespace {

struct Panel {
  double a;
  double b;
};

double panel_trace(const SystemSpec& spec, const GaussLegendre& rule, double a, double b) {
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  double s = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double th = mid + half * rule.nodes[i];
    const double E = 2.0 * spec.t_c * std::cos(th);
    s += half * rule.weights[i] * 2.0 * spec.t_c * std::sin(th) * spectral_density(E, spec).trace().real();
  }
  return s;
}

void refine(const SystemSpec& spec, const GaussLegendre& rule, double a, double b, double whole, double tol,
            std::size_t depth, std::vector<Panel>& out) {
  const double m = 0.5 * (a + b);
  const double left = panel_trace(spec, rule, a, m);
  const double right = panel_trace(spec, rule, m, b);
  if (depth == 0 || std::abs(left + right - whole) <= tol) {
    out.push_back({a, b});
    return;
  }
  refine(spec, rule, a, m, left, tol, depth - 1, out);
  refine(spec, rule, m, b, right, tol, depth - 1, out);
}

}  // namespace

EnergyGrid adaptive_spectral_grid(const SystemSpec& spec, const DispersiveOptions& options) {
  const GaussLegendre rule = gauss_legendre(options.per_panel);
  const double h = std::numbers::pi / static_cast<double>(options.panels);
  std::vector<Panel> panels;
  for (std::size_t p = 0; p < options.panels; ++p) {
    const double a = p * h;
    const double b = (p + 1) * h;
    refine(spec, rule, a, b, panel_trace(spec, rule, a, b), options.refine_tol, options.max_depth, panels);
  }
  EnergyGrid grid;
  grid.t_c = spec.t_c;
  for (const auto& pn : panels) {
    const double half = 0.5 * (pn.b - pn.a);
    const double mid = 0.5 * (pn.a + pn.b);
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      const double th = mid + half * rule.nodes[i];
      grid.theta.push_back(th);
      grid.energy.push_back(2.0 * spec.t_c * std::cos(th));
      grid.weight.push_back(half * rule.weights[i] * 2.0 * spec.t_c * std::sin(th));
    }
  }
  return grid;
}

std::vector<SampleMatrix> propagator_amplitudes(const SystemSpec& spec, const EnergyGrid& grid, double ds,
                                                std::size_t steps) {
  const auto N = static_cast<Eigen::Index>(spec.dim());
  const std::size_t nodes = grid.size();
  // weights[(j * N + n) * nodes + i] = w_i F_jn(E_i)
  std::vector<Complex> weights(static_cast<std::size_t>(N * N) * nodes);
  for (std::size_t i = 0; i < nodes; ++i) {
    const SampleMatrix F = spectral_density(grid.energy[i], spec);
    for (Eigen::Index j = 0; j < N; ++j)
      for (Eigen::Index n = 0; n < N; ++n)
        weights[static_cast<std::size_t>(j * N + n) * nodes + i] = grid.weight[i] * F(j, n);
  }
  std::vector<Complex> phase(nodes);
  std::vector<Complex> advance(nodes);
  for (std::size_t i = 0; i < nodes; ++i) advance[i] = std::polar(1.0, ds * grid.energy[i]);

  std::vector<SampleMatrix> out(steps, SampleMatrix(N, N));
  constexpr std::size_t kReseed = 256;
  for (std::size_t k = 0; k < steps; ++k) {
    if (k % kReseed == 0) {
      const double s = ds * static_cast<double>(k);
      for (std::size_t i = 0; i < nodes; ++i) phase[i] = std::polar(1.0, s * grid.energy[i]);
    } else {
      kernels::cmul_inplace(nodes, phase.data(), advance.data());
    }
    for (Eigen::Index j = 0; j < N; ++j)
      for (Eigen::Index n = 0; n < N; ++n)
        out[k](j, n) = kernels::cdotu(nodes, weights.data() + static_cast<std::size_t>(j * N + n) * nodes, phase.data());
  }
  return out;
}

DispersiveReport dispersive_constants(const SystemSpec& spec, const DispersiveOptions& options) {
  DispersiveReport r;
  r.t_max = options.t_max > 0.0 ? options.t_max : 200.0 / spec.t_c;
  const double ds = options.ds > 0.0 ? options.ds : 0.025 / spec.t_c;
  const auto steps = static_cast<std::size_t>(std::ceil(r.t_max / ds)) + 1;
  const double h = r.t_max / static_cast<double>(steps - 1);

  const EnergyGrid grid = adaptive_spectral_grid(spec, options);
  r.grid_nodes = grid.size();
  const auto N = static_cast<Eigen::Index>(spec.dim());
  r.spectral_weight.assign(static_cast<std::size_t>(N), 0.0);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const SampleMatrix F = spectral_density(grid.energy[i], spec);
    for (Eigen::Index j = 0; j < N; ++j) r.spectral_weight[static_cast<std::size_t>(j)] += grid.weight[i] * F(j, j).real();
  }

  const auto amps = propagator_amplitudes(spec, grid, h, steps);
  r.integrals = RealMatrix::Zero(N, N);
  const double t_lo = r.t_max / 10.0;
  const double t_mid = r.t_max / std::sqrt(10.0);
  std::vector<double> mod(steps);
  double worst_growth = 0.0;
  double scale = 0.0;
  for (const auto& a : amps) scale = std::max(scale, a.cwiseAbs().maxCoeff());
  for (Eigen::Index j = 0; j < N; ++j) {
    for (Eigen::Index n = 0; n < N; ++n) {
      double early = 0.0;
      double late = 0.0;
      for (std::size_t k = 0; k < steps; ++k) {
        mod[k] = std::abs(amps[k](j, n));
        const double s = h * static_cast<double>(k);
        if (s < t_lo) continue;
        const double env = std::pow(s, 1.5) * mod[k];
        if (s < t_mid) {
          early = std::max(early, env);
        } else {
          late = std::max(late, env);
        }
      }
      const double integral = simpson(mod, h);
      const double c = std::max(early, late);
      r.integrals(j, n) = integral;
      r.tail_constant = std::max(r.tail_constant, c);
      if (c > 1e-10 * std::max(scale, 1e-300)) {
        const double growth = early > 0.0 ? late / early : std::numeric_limits<double>::infinity();
        worst_growth = std::max(worst_growth, growth);
      }
      r.M = std::max(r.M, integral + 2.0 * c / std::sqrt(r.t_max));
    }
  }
  r.growth_ratio = worst_growth;
  const double nn = nu_norm1(spec.nu);
  r.lambda0 = nn > 0.0 ? 1.0 / (12.0 * nn * r.M) : std::numeric_limits<double>::infinity();
  if (worst_growth > options.growth_limit) {
    throw NonDecayingPropagator("s^{3/2}|<zeta_j, e^{isH} zeta_n>| grows by a factor " + std::to_string(worst_growth) +
                                " over the last decade of s");
  }
  return r;
}

}  // namespace nesslab

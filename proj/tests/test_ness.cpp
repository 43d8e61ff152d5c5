// Copyright 2026 The nesslab Authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "nesslab/errors.hpp"
#include "nesslab/greens.hpp"
#include "nesslab/ness.hpp"

using namespace nesslab;

namespace {

constexpr double kPi = std::numbers::pi;

SystemSpec two_site(double lambda) {
  SystemSpec s;
  s.tau = 0.45;
  s.h_s = SampleMatrix::Zero(2, 2);
  s.h_s(0, 0) = -0.3;
  s.h_s(1, 1) = 0.4;
  s.h_s(0, 1) = Complex(0.2, 0.1);
  s.h_s(1, 0) = std::conj(s.h_s(0, 1));
  s.nu = RealMatrix::Constant(2, 2, 0.25);
  s.nu.diagonal().setConstant(0.5);
  s.lambda = lambda;
  s.S1 = CVector::Unit(2, 0);
  s.S2 = CVector(2);
  s.S2 << 0.6, Complex(0.0, 0.8);
  s.L1 = {{0, 1.0}, {1, 0.5}};
  s.L2 = {{0, Complex(0.3, 0.4)}, {2, 1.0}};
  s.beta1 = s.beta2 = 20.0;
  s.mu1 = -0.2;
  s.mu2 = 0.3;
  s.n_particles = 1.0;
  return s;
}

SystemSpec equal(SystemSpec s, double beta = 20.0, double mu = 0.1) {
  s.beta1 = s.beta2 = beta;
  s.mu1 = s.mu2 = mu;
  return s;
}

SystemSpec dot(double alpha, double tau, double lambda) {
  SystemSpec s = single_dot(alpha, tau);
  s.lambda = lambda;
  s.mu1 = -0.1;
  s.mu2 = 0.1;
  return s;
}

Complex random_complex(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  return {u(rng), u(rng)};
}

SystemSpec random_spec(std::mt19937_64& rng, Eigen::Index n) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  SystemSpec s;
  s.tau = 0.3 + 0.4 * u(rng);
  s.h_s = SampleMatrix::Zero(n, n);
  s.nu = RealMatrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    s.h_s(i, i) = -0.5 + u(rng);
    for (Eigen::Index j = i + 1; j < n; ++j) {
      s.h_s(i, j) = 0.3 * random_complex(rng);
      s.h_s(j, i) = std::conj(s.h_s(i, j));
    }
    for (Eigen::Index j = i; j < n; ++j) s.nu(i, j) = s.nu(j, i) = 0.5 * u(rng) / static_cast<double>(n);
  }
  s.S1 = CVector(n);
  s.S2 = CVector(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    s.S1(i) = random_complex(rng);
    s.S2(i) = random_complex(rng);
  }
  s.S1.normalize();
  s.S2.normalize();
  s.L1 = {{0, 1.0}, {1, 0.3 * random_complex(rng)}};
  s.L2 = {{0, 1.0}, {2, 0.3 * random_complex(rng)}};
  s.beta1 = s.beta2 = u(rng) < 0.5 ? kInfinity : 10.0 + 40.0 * u(rng);
  s.mu1 = s.mu2 = -1.0 + 2.0 * u(rng);
  s.n_particles = 0.5 * static_cast<double>(n);
  return s;
}

double l1(const EnergyGrid& g, const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) s += g.weight[i] * std::abs(a[i] - b[i]);
  return s;
}

double slope(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// (1/pi) int f Im <zeta_k|(H + V - E - i0)^{-1}|zeta_k> dE on an independent grid.
RVector resolvent_occupations(const SystemSpec& s, const SampleMatrix& extra, std::size_t nodes) {
  const std::vector<double> mu{s.mu1};
  const EnergyGrid g = make_theta_grid(s.t_c, nodes, mu);
  const std::size_t n = s.dim();
  RVector out = RVector::Zero(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Resolvent r(s, g.energy[i], extra);
    const double f = fermi_dirac(g.energy[i], s.beta1, s.mu1);
    for (std::size_t k = 0; k < n; ++k)
      out(static_cast<Eigen::Index>(k)) += g.weight[i] * f * r.s_inverse()(k, k).imag() / kPi;
  }
  return out;
}

}  // namespace

TEST_CASE("lambda = 0 returns the free amplitudes") {
  const SystemSpec s = two_site(0.0);
  const NessProblem p(s, ness_grid(s, 256));
  const NessSolution sol = solve_w(p);
  const SpectralAmplitudes w0 = p.free_amplitudes();
  double diff = 0.0;
  for (std::size_t n = 0; n < 2; ++n)
    for (int sg = 0; sg < 2; ++sg)
      for (std::size_t i = 0; i < p.grid().size(); ++i) diff = std::max(diff, std::abs(sol.w(n, sg, i) - w0(n, sg, i)));
  CHECK(diff == 0.0);
  CHECK(sol.sweeps <= 2);
  CHECK(sol.potential.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("free amplitudes follow the closed form") {
  const SystemSpec s = two_site(0.0);
  const NessProblem p(s, ness_grid(s, 64));
  const SpectralAmplitudes w0 = p.free_amplitudes();
  for (std::size_t i = 0; i < p.grid().size(); i += 7) {
    const double E = p.grid().energy[i];
    const Resolvent r(s, E);
    for (int sg = 0; sg < 2; ++sg) {
      const CVector x = r.s_inverse() * s.S(sg);
      const Complex fl = fourier_lead(s.L(sg), E, s.t_c);
      for (std::size_t n = 0; n < 2; ++n)
        CHECK(std::abs(w0(n, sg, i) - (-s.tau * fl * std::conj(x(static_cast<Eigen::Index>(n))))) < 1e-14);
    }
  }
}

TEST_CASE("contraction ratio is bounded by lambda / lambda0") {
  const SystemSpec base = dot(0.5, 0.5, 0.0);
  const DispersiveReport rep = dispersive_constants(base);
  REQUIRE(rep.lambda0 > 0.0);
  for (double frac : {0.25, 0.5}) {
    SystemSpec s = base;
    s.lambda = frac * rep.lambda0;
    const NessProblem p(s, ness_grid(s, 512));
    const NessSolution sol = solve_w(p);
    CHECK(sol.contraction_ratio <= 1.1 * frac);
    CHECK(sol.residuals.back() < 1e-10);
  }
  SystemSpec s = base;
  s.lambda = 0.05;
  const NessSolution sol = solve_w(NessProblem(s, ness_grid(s, 512)));
  CHECK(sol.contraction_ratio <= 0.05 / rep.lambda0);
}

TEST_CASE("residuals decrease geometrically") {
  const SystemSpec s = two_site(0.2);
  const NessSolution sol = solve_w(NessProblem(s, ness_grid(s, 256)));
  REQUIRE(sol.residuals.size() >= 3);
  for (std::size_t k = 1; k + 1 < sol.residuals.size(); ++k) CHECK(sol.residuals[k] < sol.residuals[k - 1]);
}

TEST_CASE("occupations are continuous as beta goes to infinity") {
  SystemSpec a = dot(0.5, 0.5, 0.05);
  SystemSpec b = a;
  a.beta1 = 1e4;
  const NessSolution sa = solve_w(NessProblem(a, ness_grid(a, 512)));
  const NessSolution sb = solve_w(NessProblem(b, ness_grid(b, 512)));
  CHECK((sa.c - sb.c).cwiseAbs().maxCoeff() < 1e-3);
}

TEST_CASE("steady transmittance at lambda = 0 equals transmittance0") {
  const SystemSpec s = two_site(0.0);
  const NessProblem p(s, ness_grid(s, 256));
  const std::vector<double> t = steady_transmittance(p, solve_w(p));
  for (std::size_t i = 0; i < t.size(); ++i) CHECK(std::abs(t[i] - transmittance0(p.grid().energy[i], s)) < 1e-8);
}

TEST_CASE("steady transmittance is nonnegative") {
  for (double lambda : {0.05, 0.2}) {
    const SystemSpec s = two_site(lambda);
    const NessProblem p(s, ness_grid(s, 256));
    for (double v : steady_transmittance(p, solve_w(p))) CHECK(v >= -1e-10);
  }
}

TEST_CASE("zero bias gives zero current") {
  std::mt19937_64 rng(2024);
  for (int k = 0; k < 5; ++k) {
    const SystemSpec base = random_spec(rng, 2);
    for (double lambda : {0.0, 0.05}) {
      SystemSpec s = base;
      s.lambda = lambda;
      const NessProblem p(s, ness_grid(s, 256));
      CHECK(std::abs(steady_current(s, p.grid(), steady_transmittance(p, solve_w(p)))) < 1e-9);
    }
  }
}

TEST_CASE("positive bias at zero temperature") {
  const SystemSpec s = two_site(0.1);
  SystemSpec z = s;
  z.beta1 = z.beta2 = kInfinity;
  const NessProblem p(z, ness_grid(z, 512));
  const std::vector<double> t = steady_transmittance(p, solve_w(p));
  double window = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double E = p.grid().energy[i];
    if (E > z.mu1 && E < z.mu2) window += p.grid().weight[i] * t[i];
  }
  const double I = steady_current(z, p.grid(), t);
  CHECK(I > 0.0);
  CHECK(I == doctest::Approx(2.0 * kPi * window).epsilon(1e-12));
}

TEST_CASE("single-dot current matches the closed form") {
  const SystemSpec s = dot(0.0, 0.2, 0.0);
  const NessProblem p(s, ness_grid(s, 512));
  const double I = steady_current(s, p.grid(), steady_transmittance(p, solve_w(p)));
  const std::size_t m = 4000;
  const double h = 0.2 / static_cast<double>(m);
  std::vector<double> f(m + 1);
  for (std::size_t i = 0; i <= m; ++i) {
    const double E = -0.1 + h * static_cast<double>(i);
    const Complex fe(-E + 0.04 * E, -0.04 * std::sqrt(4.0 - E * E));
    f[i] = std::pow(0.2, 4) * (4.0 - E * E) / (4.0 * kPi * kPi * std::norm(fe));
  }
  CHECK(std::abs(I - 2.0 * kPi * simpson(f, h)) < 1e-8);
}

TEST_CASE("current integrates the transmittance") {
  const SystemSpec s = two_site(0.1);
  const NessProblem p(s, ness_grid(s, 256));
  const std::vector<double> t = steady_transmittance(p, solve_w(p));
  double manual = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double E = p.grid().energy[i];
    manual += p.grid().weight[i] * (fermi_dirac(E, s.beta2, s.mu2) - fermi_dirac(E, s.beta1, s.mu1)) * t[i];
  }
  CHECK(steady_current(s, p.grid(), t) == doctest::Approx(2.0 * kPi * manual).epsilon(1e-13));
}

TEST_CASE("equilibrium occupations at lambda = 0 match resolvent quadrature") {
  const SystemSpec s = equal(two_site(0.0));
  const NessProblem p(s, ness_grid(s, 1024));
  const RVector n = steady_occupations(p, solve_w(p));
  const RVector oracle = resolvent_occupations(s, SampleMatrix(), 4000);
  CHECK((n - oracle).cwiseAbs().maxCoeff() < 1e-6);
  CHECK(n.minCoeff() >= 0.0);
  CHECK(n.maxCoeff() <= 1.0);
}

TEST_CASE("narrow resonance occupies the level with the Fermi weight") {
  const double alpha = 0.3, beta = 5.0;
  SystemSpec s = single_dot(alpha, 0.02);
  s.beta1 = s.beta2 = beta;
  std::vector<double> breaks;
  for (int k = 0; k <= 12; ++k) {
    breaks.push_back(alpha - 1e-4 * std::pow(2.0, k));
    breaks.push_back(alpha + 1e-4 * std::pow(2.0, k));
  }
  const NessProblem p(s, make_theta_grid(1.0, 4096, breaks));
  const RVector n = steady_occupations(p, solve_w(p));
  CHECK(std::abs(n(0) - fermi_dirac(alpha, beta, 0.0)) < 5e-3);
}

TEST_CASE("effective Hamiltonian") {
  SUBCASE("vanishes at lambda = 0") {
    const SystemSpec s = two_site(0.0);
    const NessProblem p(s, ness_grid(s, 128));
    const EffectiveHamiltonian eff = effective_hamiltonian(p);
    CHECK(eff.V_eff.cwiseAbs().maxCoeff() == 0.0);
    const EffectiveTransmittance et = effective_transmittance(p, eff);
    for (std::size_t i = 0; i < et.via_t_matrix.size(); ++i)
      CHECK(std::abs(et.via_t_matrix[i] - transmittance0(p.grid().energy[i], s)) < 1e-14);
  }
  SUBCASE("two transmittance routes agree") {
    const SystemSpec s = two_site(0.1);
    const NessProblem p(s, ness_grid(s, 256));
    const EffectiveTransmittance et = effective_transmittance(p, effective_hamiltonian(p));
    for (std::size_t i = 0; i < et.via_t_matrix.size(); ++i) CHECK(std::abs(et.via_t_matrix[i] - et.via_waves[i]) < 1e-8);
  }
  SUBCASE("equal-reservoir occupations match resolvent quadrature") {
    const SystemSpec s = equal(two_site(0.1));
    const NessProblem p(s, ness_grid(s, 1024));
    const EffectiveHamiltonian eff = effective_hamiltonian(p);
    CHECK((eff.s - resolvent_occupations(s, SampleMatrix(), 4000)).cwiseAbs().maxCoeff() < 1e-6);
    const SampleMatrix v = hartree_potential(eff.s.cast<Complex>().asDiagonal(), s);
    CHECK((eff.V_eff - v).cwiseAbs().maxCoeff() < 1e-15);
    const std::vector<double> e = default_condition_energies(eff.spec_eff, 801);
    CHECK(spectral_condition_check(eff.spec_eff, e).margin > 0.0);
  }
}

TEST_CASE("steady and effective transmittances differ at second order") {
  const std::vector<double> lambdas{0.02, 0.04, 0.08};
  std::vector<double> gaps;
  for (double lambda : lambdas) {
    const SystemSpec s = two_site(lambda);
    const NessProblem p(s, ness_grid(s, 512));
    const std::vector<double> t = steady_transmittance(p, solve_w(p));
    gaps.push_back(l1(p.grid(), t, effective_transmittance(p, effective_hamiltonian(p)).via_t_matrix));
  }
  CHECK(slope(lambdas, gaps) == doctest::Approx(2.0).epsilon(0.15));
}

TEST_CASE("transmittance is linear in lambda up to second order") {
  const std::vector<double> lambdas{0.02, 0.04, 0.08};
  auto transmittance = [](double lambda) {
    const SystemSpec s = two_site(lambda);
    const NessProblem p(s, ness_grid(s, 512));
    return steady_transmittance(p, solve_w(p));
  };
  const SystemSpec s0 = two_site(0.0);
  const EnergyGrid g = ness_grid(s0, 512);
  const std::vector<double> t0 = transmittance(0.0);
  const std::vector<double> tp = transmittance(1e-3);
  const std::vector<double> t2 = transmittance(2e-3);
  std::vector<double> res;
  for (double lambda : lambdas) {
    const std::vector<double> t = transmittance(lambda);
    std::vector<double> lin(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) lin[i] = t0[i] + lambda * (4.0 * tp[i] - t2[i] - 3.0 * t0[i]) / 2e-3;
    res.push_back(l1(g, t, lin));
  }
  CHECK(slope(lambdas, res) == doctest::Approx(2.0).epsilon(0.15));
}

TEST_CASE("MN occupation map") {
  SUBCASE("lambda = 0 returns the free occupations") {
    const SystemSpec s = equal(two_site(0.0));
    const NessProblem p(s, ness_grid(s, 512));
    const MnResult mn = mn_fixed_point(p);
    CHECK((mn.n - mn.s).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(mn.iterations <= 2);
  }
  SUBCASE("unequal reservoirs are rejected") {
    const SystemSpec s = two_site(0.1);
    CHECK_THROWS_AS(mn_fixed_point(NessProblem(s, ness_grid(s, 64))), NotEquilibrium);
  }
  SUBCASE("distance to the free occupations is first order") {
    const std::vector<double> lambdas{0.02, 0.04, 0.08};
    std::vector<double> d;
    for (double lambda : lambdas) {
      const SystemSpec s = equal(two_site(lambda));
      d.push_back(mn_fixed_point(NessProblem(s, ness_grid(s, 512))).distance_to_s);
    }
    CHECK(slope(lambdas, d) >= 0.8);
  }
}

TEST_CASE("steady occupations are self-consistent at equilibrium") {
  for (double lambda : {0.05, 0.2}) {
    const SystemSpec s = equal(two_site(lambda));
    const NessProblem p(s, ness_grid(s, 1024));
    const RVector n = steady_occupations(p, solve_w(p));
    const SampleMatrix v = hartree_potential(n.cast<Complex>().asDiagonal(), s);
    CHECK((n - resolvent_occupations(s, v, 4000)).cwiseAbs().maxCoeff() < 1e-6);
  }
}

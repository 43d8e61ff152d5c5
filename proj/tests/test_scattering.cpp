// Copyright 2026 The nesslab Authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "nesslab/greens.hpp"
#include "nesslab/quadrature.hpp"
#include "nesslab/scattering.hpp"

using namespace nesslab;

namespace {

constexpr double kPi = std::numbers::pi;

SystemSpec two_site(double tau) {
  SystemSpec s;
  s.tau = tau;
  s.h_s = SampleMatrix::Zero(2, 2);
  s.h_s(0, 0) = -0.3;
  s.h_s(1, 1) = 0.4;
  s.h_s(0, 1) = Complex(0.2, 0.1);
  s.h_s(1, 0) = std::conj(s.h_s(0, 1));
  s.nu = RealMatrix::Identity(2, 2);
  s.S1 = CVector::Unit(2, 0);
  s.S2 = CVector(2);
  s.S2 << 0.6, Complex(0.0, 0.8);
  s.L1 = {{0, 1.0}, {1, 0.5}};
  s.L2 = {{0, Complex(0.3, 0.4)}, {2, 1.0}};
  s.n_particles = 1.0;
  return s;
}

CompactVector test_vector() {
  CompactVector v = CompactVector::from_sample(Eigen::Vector2cd(Complex(0.3, -0.2), 0.7));
  v.lead1 = {{0, 0.4}, {3, Complex(0.0, 0.5)}};
  v.lead2 = {{1, -0.6}};
  return v;
}

}  // namespace

TEST_CASE("lead eigenfunction values") {
  CHECK(lead_eigenfunction(0, 0.0, 1.0) == doctest::Approx(1.0 / std::sqrt(kPi)).epsilon(1e-15));
  CHECK(std::abs(lead_eigenfunction(1, 0.0, 1.0)) < 1e-15);
  CHECK_THROWS_AS(lead_eigenfunction(0, 2.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(lead_eigenfunction(0, -2.5, 1.0), std::domain_error);
}

TEST_CASE("lead eigenfunctions are complete and orthonormal") {
  for (double t_c : {1.0, 0.8}) {
    const EnergyGrid g = make_theta_grid(t_c, 512);
    for (std::size_t n = 0; n < 6; ++n) {
      for (std::size_t m = 0; m < 6; ++m) {
        double s = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i)
          s += g.weight[i] * lead_eigenfunction(n, g.energy[i], t_c) * lead_eigenfunction(m, g.energy[i], t_c);
        CHECK(std::abs(s - (n == m ? 1.0 : 0.0)) < 1e-8);
      }
    }
  }
}

TEST_CASE("fourier transform on the lead") {
  for (double E : {-1.5, 0.2, 1.9}) {
    const double theta = std::acos(E / 2.0);
    CHECK(std::abs(fourier_lead({{0, 1.0}}, E, 1.0) - std::sqrt(std::sin(theta) / kPi)) < 1e-15);
    CHECK(fourier_lead({}, E, 1.0) == Complex(0.0));
  }
  const EnergyGrid g = make_theta_grid(1.0, 512);
  double norm = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) norm += g.weight[i] * std::norm(fourier_lead({{0, 1.0}, {3, 0.5}}, g.energy[i], 1.0));
  CHECK(norm == doctest::Approx(1.25).epsilon(1e-12));
  CHECK_THROWS_AS(fourier_lead({{0, 1.0}}, 2.1, 1.0), std::domain_error);
}

TEST_CASE("decoupled generalized eigenfunctions are the free ones") {
  const SystemSpec s = two_site(0.0);
  const double E = 0.7;
  for (int sigma = 0; sigma < 2; ++sigma) {
    for (Boundary b : {Boundary::Upper, Boundary::Lower}) {
      const GeneralizedEigenfunction psi = lippmann_schwinger(E, sigma, b, s, {0, 12});
      CHECK(psi.sample.cwiseAbs().maxCoeff() == 0.0);
      for (std::size_t n = 0; n < 12; ++n) {
        CHECK(std::abs(psi.lead_values[sigma][n] - lead_eigenfunction(n, E, 1.0)) < 1e-15);
        CHECK(psi.lead_values[1 - sigma][n] == Complex(0.0));
      }
    }
  }
}

TEST_CASE("sample components of the generalized eigenfunctions") {
  const SystemSpec s = two_site(0.45);
  for (double E : {-1.3, 0.1, 1.6}) {
    const Resolvent r(s, E);
    for (int sigma = 0; sigma < 2; ++sigma) {
      const Complex fl = std::conj(fourier_lead(s.L(sigma), E, s.t_c));
      for (Boundary b : {Boundary::Upper, Boundary::Lower}) {
        const GeneralizedEigenfunction psi = lippmann_schwinger(E, sigma, b, s, {0, 4});
        const CVector expected = -s.tau * fl * (r.s_inverse(b) * s.S(sigma));
        CHECK((psi.sample - expected).cwiseAbs().maxCoeff() < 1e-14);
      }
    }
  }
}

TEST_CASE("generalized eigenfunctions solve the Schrodinger equation") {
  const SystemSpec s = two_site(0.45);
  for (double E : {-1.8, -0.5, 0.3, 1.2}) {
    for (int sigma = 0; sigma < 2; ++sigma) {
      for (Boundary b : {Boundary::Upper, Boundary::Lower}) {
        CHECK(schrodinger_residual(lippmann_schwinger(E, sigma, b, s, {5, 21}), s) < 1e-10);
        CHECK(schrodinger_residual(lippmann_schwinger(E, sigma, b, s, {0, 21}), s) < 1e-10);
      }
    }
  }
}

TEST_CASE("wave transform reduces to the lead transform when decoupled") {
  const SystemSpec s = two_site(0.0);
  const CompactVector psi = CompactVector::on_lead(Lead::Two, {{0, 0.5}, {4, Complex(0.0, 1.0)}});
  for (double E : {-0.9, 0.4}) {
    CHECK(std::abs(wave_transform(psi, E, 1, s) - fourier_lead(psi.lead2, E, 1.0)) < 1e-15);
    CHECK(wave_transform(psi, E, 0, s) == Complex(0.0));
  }
}

TEST_CASE("wave transform of the single dot at the band centre") {
  const SystemSpec s = single_dot(0.5, 0.2);
  const Complex w = wave_transform(CompactVector::sample_basis(0, 1), 0.0, 0, s);
  const double expected = 0.04 * (1.0 / kPi) / std::norm(Complex(0.5, -0.08));
  CHECK(std::norm(w) == doctest::Approx(expected).epsilon(1e-13));
  CHECK(std::norm(w) == doctest::Approx(0.04 / (kPi * 0.2564)).epsilon(1e-12));
  const ScatteringFrame frame(s, 0.0);
  CHECK(std::abs(frame.sample_wave_transform(0, 0) - w) < 1e-15);
}

TEST_CASE("wave transforms are isometric and intertwine functions of H") {
  const SystemSpec s = two_site(0.45);
  const CompactVector psi = test_vector();
  const EnergyGrid g = make_theta_grid(1.0, 2048);
  const double norm2 = psi.sample.squaredNorm() + 0.16 + 0.25 + 0.36;
  double total = 0.0, weighted = 0.0, resolvent = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double E = g.energy[i];
    const ScatteringFrame f(s, E);
    const double dens = std::norm(f.wave_transform(psi, 0)) + std::norm(f.wave_transform(psi, 1));
    const double phi = std::exp(-E * E);
    total += g.weight[i] * dens;
    weighted += g.weight[i] * phi * dens;
    resolvent += g.weight[i] * phi * f.resolvent().element(psi, psi).imag() / kPi;
  }
  CHECK(total == doctest::Approx(norm2).epsilon(1e-6));
  CHECK(std::abs(weighted - resolvent) < 1e-6);
}

TEST_CASE("transmittance of the single dot") {
  const SystemSpec s = single_dot(0.5, 0.2);
  const double oracle = std::pow(0.2, 4) / (kPi * kPi * std::norm(Complex(0.5, -0.08)));
  CHECK(transmittance0(0.0, s) == doctest::Approx(oracle).epsilon(1e-13));
  CHECK(transmittance0(0.0, s) == doctest::Approx(6.32e-4).epsilon(1e-3));
  CHECK(transmittance0(0.3, single_dot(0.5, 0.0)) == 0.0);
  CHECK(transmittance0(2.5, s) == 0.0);
}

TEST_CASE("T-matrix obeys the optical theorem and is symmetric in modulus") {
  const SystemSpec s = two_site(0.45);
  const EnergyGrid g = make_theta_grid(1.0, 128);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Eigen::Matrix2cd T = t_matrix(g.energy[i], s);
    const Eigen::Matrix2cd lhs = T - T.adjoint();
    const Eigen::Matrix2cd rhs = Complex(0.0, -2.0 * kPi) * T * T.adjoint();
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-13);
    CHECK(std::abs(std::abs(T(0, 1)) - std::abs(T(1, 0))) < 1e-14);
    CHECK(2.0 * kPi * std::norm(T(0, 1)) <= 1.0 + 1e-13);
  }
}

TEST_CASE("transmittance vanishes linearly in the distance to a band edge") {
  const SystemSpec s = two_site(0.45);
  for (double edge : {2.0, -2.0}) {
    const double dir = edge > 0 ? -1.0 : 1.0;
    const double a = transmittance0(edge + dir * 1e-4, s) / 1e-4;
    const double b = transmittance0(edge + dir * 1e-6, s) / 1e-6;
    CHECK(b == doctest::Approx(a).epsilon(0.02));
    CHECK(b > 0.0);
  }
}

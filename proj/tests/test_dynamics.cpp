// Copyright 2026 The nesslab Authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>

#include "nesslab/dynamics.hpp"
#include "nesslab/equilibrium.hpp"
#include "nesslab/errors.hpp"

using namespace nesslab;

namespace {

SystemSpec two_site(double lambda, double tau = 0.45) {
  SystemSpec s;
  s.tau = tau;
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

SampleMatrix sample_state(const SystemSpec& s) { return solve_sample_equilibrium(s).rho_s; }

Trajectory synthetic(std::function<double(double)> current) {
  Trajectory tr;
  for (int k = 0; k <= 100; ++k) {
    EvolutionState st;
    st.t = 0.5 * k;
    st.occupations = RVector::Constant(1, 0.4);
    st.current = current(st.t);
    tr.states.push_back(st);
  }
  return tr;
}

}  // namespace

TEST_CASE("zero-temperature lead blocks are half filled projectors") {
  for (std::size_t L : {20u, 21u}) {
    SystemSpec s = two_site(0.0);
    s.beta1 = s.beta2 = kInfinity;
    s.mu1 = s.mu2 = 0.0;
    const DenseMatrix rho = initial_state_truncated(s, L, sample_state(s));
    const auto Li = static_cast<Eigen::Index>(L);
    for (int lead = 0; lead < 2; ++lead) {
      const DenseMatrix block = rho.block(lead * Li, lead * Li, Li, Li);
      CHECK(block.trace().real() == doctest::Approx(static_cast<double>(L / 2)).epsilon(1e-12));
      CHECK((block * block - block).cwiseAbs().maxCoeff() < 1e-12);
    }
    CHECK(rho.block(0, Li, Li, Li).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("infinite temperature lead blocks are half the identity") {
  SystemSpec s = two_site(0.0);
  s.beta1 = s.beta2 = 1e-10;
  const std::size_t L = 12;
  const DenseMatrix rho = initial_state_truncated(s, L, sample_state(s));
  const DenseMatrix leads = rho.topLeftCorner(2 * L, 2 * L);
  CHECK((leads - 0.5 * DenseMatrix::Identity(2 * L, 2 * L)).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("sample block carries the sample state") {
  const SystemSpec s = two_site(0.1);
  const SampleMatrix rs = sample_state(s);
  const DenseMatrix rho = initial_state_truncated(s, 10, rs);
  CHECK((rho.bottomRightCorner(2, 2) - rs).cwiseAbs().maxCoeff() == 0.0);
  CHECK(rho.bottomRightCorner(2, 2).trace().real() == doctest::Approx(s.n_particles).epsilon(1e-10));
  CHECK_THROWS_AS(initial_state_truncated(s, 10, SampleMatrix::Identity(3, 3)), std::invalid_argument);
}

TEST_CASE("Picard propagator") {
  const std::size_t L = 12;
  SUBCASE("starts at the identity") {
    const SystemSpec s = two_site(0.05);
    const PicardResult r = picard_propagator(s, L, initial_state_truncated(s, L, sample_state(s)), 0.0, 0.01);
    CHECK((r.U - DenseMatrix::Identity(r.U.rows(), r.U.cols())).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("is the exponential at lambda = 0") {
    const SystemSpec s = two_site(0.0);
    const DenseMatrix rho = initial_state_truncated(s, L, sample_state(s));
    const PicardResult r = picard_propagator(s, L, rho, 0.5, 0.005);
    const DenseMatrix H = assemble_truncated(s, L).matrix;
    CHECK((r.U - exact_propagator(H, 0.5)).cwiseAbs().maxCoeff() < 1e-8);
    CHECK((r.rho - exact_evolution(H, rho, 0.5)).cwiseAbs().maxCoeff() < 1e-8);
  }
  SUBCASE("stays unitary over five windows") {
    const SystemSpec s = two_site(0.05);
    const DenseMatrix rho = initial_state_truncated(s, L, sample_state(s));
    PicardOptions probe;
    const PicardResult first = picard_propagator(s, L, rho, 0.0, 0.005, probe);
    PicardOptions opt;
    opt.window_override = first.admissible_window * 0.9;
    const PicardResult r = picard_propagator(s, L, rho, 5.0 * opt.window_override, 0.005, opt);
    CHECK(r.windows >= 5);
    const auto D = r.U.rows();
    CHECK((r.U.adjoint() * r.U - DenseMatrix::Identity(D, D)).cwiseAbs().maxCoeff() < 1e-8);
    CHECK(r.max_contraction_ratio < 0.95);
  }
  SUBCASE("rejects windows that do not contract") {
    SystemSpec s = two_site(2.0);
    const DenseMatrix rho = initial_state_truncated(s, L, sample_state(s));
    PicardOptions opt;
    opt.window_override = 3.0;
    CHECK_THROWS_AS(picard_propagator(s, L, rho, 3.0, 0.01, opt), WindowTooLarge);
  }
}

TEST_CASE("decoupled evolution is stationary") {
  const SystemSpec s = two_site(0.0, 0.0);
  const std::size_t L = 16;
  const DenseMatrix rho = initial_state_truncated(s, L, sample_state(s));
  EvolveOptions opt;
  opt.keep_final = true;
  const Trajectory tr = evolve_liouville(s, L, rho, 5.0, 0.05, opt);
  CHECK((tr.final_rho - rho).cwiseAbs().maxCoeff() < 1e-12);
  for (const auto& st : tr.states) CHECK(std::abs(st.current) < 1e-14);
}

TEST_CASE("linear evolution matches the exact solution") {
  const SystemSpec s = two_site(0.0);
  const std::size_t L = 30;
  const DenseMatrix rho = initial_state_truncated(s, L, sample_state(s));
  const DenseMatrix H = assemble_truncated(s, L).matrix;
  for (LiouvilleMethod m : {LiouvilleMethod::Dense, LiouvilleMethod::Orbitals}) {
    EvolveOptions opt;
    opt.method = m;
    opt.keep_final = true;
    const Trajectory tr = evolve_liouville(s, L, rho, 8.0, 0.01, opt);
    const DenseMatrix exact = exact_evolution(H, rho, 8.0);
    CHECK((tr.final_rho - exact).cwiseAbs().maxCoeff() < 1e-7);
    CHECK(std::abs((tr.final_rho * H).trace() - (rho * H).trace()) < 1e-7);
    const TruncatedOperator op = assemble_truncated(s, L);
    CHECK(tr.states.back().current == doctest::Approx(current_1(s, op, exact)).epsilon(1e-6));
    for (const auto& st : tr.states) CHECK(std::abs(st.trace_defect) < 1e-8);
  }
}

TEST_CASE("dense and orbital integrators agree") {
  const SystemSpec s = two_site(0.2);
  const std::size_t L = 30;
  const DenseMatrix rho = initial_state_truncated(s, L, sample_state(s));
  EvolveOptions dense, orb;
  dense.method = LiouvilleMethod::Dense;
  orb.method = LiouvilleMethod::Orbitals;
  dense.keep_final = orb.keep_final = true;
  const Trajectory a = evolve_liouville(s, L, rho, 6.0, 0.01, dense);
  const Trajectory b = evolve_liouville(s, L, rho, 6.0, 0.01, orb);
  CHECK(a.method == "dense");
  CHECK(b.method == "orbitals");
  const double gap = (a.final_rho - b.final_rho).cwiseAbs().maxCoeff();
  CHECK(gap < 1e-8);
  // The forms discretize different ODEs; the gap is RK4 truncation and shrinks like dt^4.
  const Trajectory a2 = evolve_liouville(s, L, rho, 6.0, 0.005, dense);
  const Trajectory b2 = evolve_liouville(s, L, rho, 6.0, 0.005, orb);
  CHECK((a2.final_rho - b2.final_rho).cwiseAbs().maxCoeff() < gap / 8.0);
  const RVector ev = Eigen::SelfAdjointEigenSolver<DenseMatrix>(a.final_rho).eigenvalues();
  CHECK(ev.minCoeff() >= -1e-8);
  CHECK(ev.maxCoeff() <= 1.0 + 1e-8);
  for (const auto& st : a.states) {
    CHECK(std::abs(st.trace_defect) < 1e-8);
    CHECK(st.hermiticity_defect < 1e-8);
  }
}

TEST_CASE("Picard and Liouville integrators agree") {
  const SystemSpec s = two_site(0.1);
  const std::size_t L = 12;
  const DenseMatrix rho = initial_state_truncated(s, L, sample_state(s));
  const PicardResult p = picard_propagator(s, L, rho, 1.0, 0.005);
  EvolveOptions opt;
  opt.method = LiouvilleMethod::Dense;
  opt.keep_final = true;
  const Trajectory tr = evolve_liouville(s, L, rho, 1.0, 0.005, opt);
  CHECK((p.rho - tr.final_rho).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("recurrence horizon") {
  const SystemSpec s = two_site(0.0);
  const std::size_t L = 10;
  const DenseMatrix rho = initial_state_truncated(s, L, sample_state(s));
  const Trajectory ok = evolve_liouville(s, L, rho, 3.9, 0.05);
  const Trajectory late = evolve_liouville(s, L, rho, 4.5, 0.05);
  CHECK(ok.recurrence_horizon == doctest::Approx(4.0));
  CHECK_FALSE(ok.recurrence_warning);
  CHECK(late.recurrence_warning);
}

TEST_CASE("plateau estimate") {
  const PlateauReport r = plateau(synthetic([](double) { return 0.25; }));
  CHECK(r.current == doctest::Approx(0.25));
  CHECK(r.occupations(0) == doctest::Approx(0.4));
  CHECK(r.drift == doctest::Approx(0.0));
  CHECK_THROWS_AS(plateau(synthetic([](double t) { return 0.1 + 0.01 * t; })), NoPlateau);
  Trajectory shorty;
  shorty.states.resize(2);
  CHECK_THROWS_AS(plateau(shorty), NoPlateau);
}

TEST_CASE("equal reservoirs carry no plateau current") {
  SystemSpec s = single_dot(0.3, 0.5);
  s.lambda = 0.05;
  s.beta1 = s.beta2 = 20.0;
  const std::size_t L = 120;
  const DenseMatrix rho = initial_state_truncated(s, L, sample_state(s));
  const Trajectory tr = evolve_liouville(s, L, rho, 45.0, 0.05);
  CHECK_FALSE(tr.recurrence_warning);
  const PlateauReport r = plateau(tr, 0.2, 1.0, 0.25);
  CHECK(std::abs(r.current) < 1e-3 * 0.25);
}

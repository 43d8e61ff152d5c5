// Copyright 2026 The nesslab Authors
// SPDX-License-Identifier: Apache-2.0

#include "nesslab/scattering.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace nesslab {

double lead_eigenfunction(std::size_t n, double E, double t_c) {
  if (!(std::abs(E) < 2.0 * t_c)) throw std::domain_error("lead eigenfunction requested outside the open band");
  const double theta = std::acos(E / (2.0 * t_c));
  return std::sin(static_cast<double>(n + 1) * theta) / std::sqrt(std::numbers::pi * t_c * std::sin(theta));
}

Complex fourier_lead(const LeadVector& f, double E, double t_c) {
  if (!(std::abs(E) < 2.0 * t_c)) throw std::domain_error("lead Fourier transform requested outside the open band");
  Complex s{};
  for (const auto& e : f) s += lead_eigenfunction(e.site, E, t_c) * e.amplitude;
  return s;
}

ScatteringFrame::ScatteringFrame(const SystemSpec& spec, double E, const SampleMatrix& extra_potential,
                                 double condition_threshold)
    : t_c_(spec.t_c),
      tau_(spec.tau),
      S_{spec.S1, spec.S2},
      resolvent_(spec, E, extra_potential, condition_threshold),
      fl_{fourier_lead(spec.L1, E, spec.t_c), fourier_lead(spec.L2, E, spec.t_c)} {
  for (std::size_t s = 0; s < 2; ++s) sinv_s_[s] = resolvent_.s_inverse() * S_[s];
}

Complex ScatteringFrame::wave_transform(const CompactVector& psi, int sigma) const {
  const auto s = static_cast<std::size_t>(sigma);
  const Complex free = psi.lead(sigma).empty() ? Complex{} : fourier_lead(psi.lead(sigma), energy(), t_c_);
  const CVector y = resolvent_.sample_part(psi, Boundary::Lower);
  return free - tau_ * fl_[s] * S_[s].dot(y);
}

Complex ScatteringFrame::sample_wave_transform(std::size_t n, int sigma) const {
  const auto s = static_cast<std::size_t>(sigma);
  return -tau_ * fl_[s] * std::conj(sinv_s_[s](static_cast<Eigen::Index>(n)));
}

Eigen::Matrix2cd ScatteringFrame::t_matrix() const {
  Eigen::Matrix2cd t;
  const double tau2 = tau_ * tau_;
  for (std::size_t j = 0; j < 2; ++j)
    for (std::size_t k = 0; k < 2; ++k)
      t(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) =
          -tau2 * fl_[j] * std::conj(fl_[k]) * S_[j].dot(sinv_s_[k]);
  return t;
}

GeneralizedEigenfunction ScatteringFrame::lippmann_schwinger(int sigma, Boundary sign, SiteWindow window) const {
  if (window.end < window.begin) throw std::invalid_argument("invalid site window");
  const auto s = static_cast<std::size_t>(sigma);
  // h_tau Psi0_sigma = tau conj(F L_sigma) S_sigma lives on the sample.
  const CompactVector source = CompactVector::from_sample(tau_ * std::conj(fl_[s]) * S_[s]);
  GeneralizedEigenfunction out;
  out.E = energy();
  out.lead = sigma;
  out.sign = sign;
  out.window = window;
  out.sample = -resolvent_.sample_part(source, sign);
  for (int j = 0; j < 2; ++j) {
    auto& values = out.lead_values[static_cast<std::size_t>(j)];
    values.reserve(window.end - window.begin);
    for (std::size_t n = window.begin; n < window.end; ++n) {
      Complex v = -resolvent_.lead_part(j, n, source, sign);
      if (j == sigma) v += lead_eigenfunction(n, energy(), t_c_);
      values.push_back(v);
    }
  }
  return out;
}

GeneralizedEigenfunction lippmann_schwinger(double E, int sigma, Boundary sign, const SystemSpec& spec,
                                            SiteWindow window, const SampleMatrix& extra) {
  return ScatteringFrame(spec, E, extra).lippmann_schwinger(sigma, sign, window);
}

double schrodinger_residual(const GeneralizedEigenfunction& psi, const SystemSpec& spec, const SampleMatrix& extra) {
  const auto& w = psi.window;
  auto value = [&](int j, std::size_t n) { return psi.lead_values[static_cast<std::size_t>(j)][n - w.begin]; };
  auto in_window = [&](std::size_t n) { return n >= w.begin && n < w.end; };
  double worst = 0.0;
  for (int j = 0; j < 2; ++j) {
    const LeadVector& L = spec.L(j);
    const Complex sx = spec.S(j).dot(psi.sample);
    for (std::size_t n = w.begin; n < w.end; ++n) {
      if (!in_window(n + 1) || (n > 0 && !in_window(n - 1))) continue;
      Complex r = spec.t_c * value(j, n + 1) - psi.E * value(j, n);
      if (n > 0) r += spec.t_c * value(j, n - 1);
      for (const auto& e : L)
        if (e.site == n) r += spec.tau * e.amplitude * sx;
      worst = std::max(worst, std::abs(r));
    }
  }
  // Sample rows need the lead values on the coupling supports.
  bool covered = true;
  for (int j = 0; j < 2; ++j)
    for (const auto& e : spec.L(j)) covered = covered && in_window(e.site);
  if (covered) {
    SampleMatrix h = spec.h_s;
    if (extra.size() != 0) h += extra;
    CVector r = h * psi.sample - psi.E * psi.sample;
    for (int j = 0; j < 2; ++j) {
      Complex form{};
      for (const auto& e : spec.L(j)) form += std::conj(e.amplitude) * value(j, e.site);
      r += spec.tau * form * spec.S(j);
    }
    worst = std::max(worst, r.cwiseAbs().maxCoeff());
  }
  return worst;
}

Complex wave_transform(const CompactVector& psi, double E, int sigma, const SystemSpec& spec,
                       const SampleMatrix& extra) {
  return ScatteringFrame(spec, E, extra).wave_transform(psi, sigma);
}

Eigen::Matrix2cd t_matrix(double E, const SystemSpec& spec, const SampleMatrix& extra) {
  return ScatteringFrame(spec, E, extra).t_matrix();
}

double transmittance0(double E, const SystemSpec& spec, const SampleMatrix& extra) {
  if (!(std::abs(E) < 2.0 * spec.t_c)) return 0.0;
  return ScatteringFrame(spec, E, extra).transmittance0();
}

}  // namespace nesslab

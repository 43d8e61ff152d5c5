// Copyright 2026 The nesslab Authors
// SPDX-License-Identifier: Apache-2.0

#include "nesslab/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "nesslab/errors.hpp"
#include "nesslab/kernels.hpp"

namespace nesslab {

namespace {

constexpr Complex kI{0.0, 1.0};

using RowMatrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Compressed rows of the static part of the truncated H.
struct SparseRows {
  std::vector<std::size_t> start;
  std::vector<std::size_t> column;
  std::vector<Complex> value;
};

SparseRows compress(const DenseMatrix& m) {
  SparseRows s;
  s.start.push_back(0);
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (m(r, c) != Complex{}) {
        s.column.push_back(static_cast<std::size_t>(c));
        s.value.push_back(m(r, c));
      }
    }
    s.start.push_back(s.column.size());
  }
  return s;
}

// out = (H + diag(v on sample rows)) Y, row-major Y with K columns.
void apply_h(const SparseRows& h, std::size_t sample0, const RVector& v, const RowMatrix& y, RowMatrix& out) {
  const auto K = static_cast<std::size_t>(y.cols());
  out.setZero();
  for (std::size_t r = 0; r + 1 < h.start.size(); ++r) {
    Complex* dst = out.data() + r * K;
    for (std::size_t e = h.start[r]; e < h.start[r + 1]; ++e)
      kernels::caxpy(K, h.value[e], y.data() + h.column[e] * K, dst);
  }
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    const std::size_t r = sample0 + static_cast<std::size_t>(k);
    kernels::caxpy(K, v(k), y.data() + r * K, out.data() + r * K);
  }
}

double lead_block_check(const SystemSpec& spec, std::size_t L) {
  const std::size_t support = std::max(max_site(spec.L1), max_site(spec.L2));
  if (L <= support) throw std::invalid_argument("truncation length does not cover the lead supports");
  return 0.0;
}

}  // namespace

DenseMatrix initial_state_truncated(const SystemSpec& spec, std::size_t L, const SampleMatrix& rho_s) {
  lead_block_check(spec, L);
  const auto N = static_cast<Eigen::Index>(spec.dim());
  if (rho_s.rows() != N || rho_s.cols() != N) throw std::invalid_argument("rho_s has wrong dimension");
  const auto l = static_cast<Eigen::Index>(L);
  Eigen::MatrixXd chain = Eigen::MatrixXd::Zero(l, l);
  for (Eigen::Index n = 0; n + 1 < l; ++n) chain(n, n + 1) = chain(n + 1, n) = spec.t_c;
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(chain);
  DenseMatrix rho = DenseMatrix::Zero(2 * l + N, 2 * l + N);
  for (int j = 0; j < 2; ++j) {
    RVector occ(l);
    for (Eigen::Index k = 0; k < l; ++k) {
      const double e = es.eigenvalues()(k);
      // Zero-temperature blocks are strict projectors below mu; levels within
      // rounding of mu (odd chains at mu = 0) stay empty.
      if (std::isinf(spec.beta(j)))
        occ(k) = e < spec.mu(j) - 1e-12 * spec.t_c ? 1.0 : 0.0;
      else
        occ(k) = fermi_dirac(e, spec.beta(j), spec.mu(j));
    }
    const Eigen::MatrixXd block = es.eigenvectors() * occ.asDiagonal() * es.eigenvectors().transpose();
    rho.block(j * l, j * l, l, l) = block.cast<Complex>();
  }
  rho.block(2 * l, 2 * l, N, N) = rho_s;
  return rho;
}

double current_1(const SystemSpec& spec, const TruncatedOperator& op, const DenseMatrix& rho) {
  Complex form{};
  for (const auto& e : spec.L1) {
    const auto a = static_cast<Eigen::Index>(op.lead_index(0, e.site));
    for (Eigen::Index k = 0; k < spec.S1.size(); ++k)
      form += std::conj(e.amplitude) * rho(a, static_cast<Eigen::Index>(op.sample_index(static_cast<std::size_t>(k)))) *
              spec.S1(k);
  }
  return -2.0 * spec.tau * form.imag();
}

DenseMatrix exact_propagator(const DenseMatrix& H, double t) {
  const Eigen::SelfAdjointEigenSolver<DenseMatrix> es(H);
  CVector phase(es.eigenvalues().size());
  for (Eigen::Index k = 0; k < phase.size(); ++k) phase(k) = std::exp(-kI * t * es.eigenvalues()(k));
  return es.eigenvectors() * phase.asDiagonal() * es.eigenvectors().adjoint();
}

DenseMatrix exact_evolution(const DenseMatrix& H, const DenseMatrix& rho, double t) {
  const DenseMatrix U = exact_propagator(H, t);
  return U * rho * U.adjoint();
}

namespace {

RVector sample_occupations(const DenseMatrix& rho, std::size_t sample0, std::size_t N) {
  RVector n(static_cast<Eigen::Index>(N));
  for (std::size_t k = 0; k < N; ++k)
    n(static_cast<Eigen::Index>(k)) = rho(static_cast<Eigen::Index>(sample0 + k), static_cast<Eigen::Index>(sample0 + k)).real();
  return n;
}

EvolutionState describe(const SystemSpec& spec, const TruncatedOperator& op, const DenseMatrix& rho, double t,
                        double trace0) {
  EvolutionState s;
  s.t = t;
  s.occupations = sample_occupations(rho, op.sample_index(0), op.N);
  s.current = current_1(spec, op, rho);
  s.trace_defect = std::abs(rho.trace().real() - trace0);
  s.hermiticity_defect = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
  return s;
}

// Cumulative fourth-order integral of equally spaced samples, I_k = int_0^{kh}.
void cumulative_simpson(const std::vector<DenseMatrix>& f, double h, std::vector<DenseMatrix>& out) {
  const std::size_t m = f.size();
  out.assign(m, DenseMatrix::Zero(f[0].rows(), f[0].cols()));
  if (m < 3) {
    if (m == 2) out[1] = 0.5 * h * (f[0] + f[1]);
    return;
  }
  out[1] = h / 12.0 * (5.0 * f[0] + 8.0 * f[1] - f[2]);
  for (std::size_t k = 2; k < m; ++k) out[k] = out[k - 2] + h / 3.0 * (f[k - 2] + 4.0 * f[k - 1] + f[k]);
}

}  // namespace

PicardResult picard_propagator(const SystemSpec& spec, std::size_t L, const DenseMatrix& rho_i, double t_end,
                               double dt, const PicardOptions& options) {
  if (!(t_end >= 0.0) || !(dt > 0.0)) throw std::invalid_argument("invalid time parameters");
  const TruncatedOperator op = assemble_truncated(spec, L);
  const DenseMatrix& H = op.matrix;
  const auto D = H.rows();
  if (rho_i.rows() != D || rho_i.cols() != D) throw std::invalid_argument("rho_i has wrong dimension");
  const std::size_t N = op.N;
  const auto s0 = static_cast<Eigen::Index>(op.sample_index(0));

  const double h_norm = Eigen::SelfAdjointEigenSolver<DenseMatrix>(H, Eigen::EigenvaluesOnly).eigenvalues().cwiseAbs().maxCoeff();
  const double nn = nu_norm1(spec.nu);
  const double r = 1.5;  // r + |A_0| with r = 1/2 and unitary A_0
  const double lip = h_norm + 4.0 * spec.lambda * nn * r * r;
  const double bound = r * (h_norm + spec.lambda * nn * r * r);
  PicardResult res;
  res.admissible_window = std::min(1.0 / lip, 1.0 / (2.0 * bound));
  const double target = options.window_override > 0.0 ? options.window_override : options.safety * res.admissible_window;
  res.windows = t_end == 0.0 ? 0 : static_cast<std::size_t>(std::ceil(t_end / target - 1e-12));
  res.window = res.windows == 0 ? 0.0 : t_end / static_cast<double>(res.windows);
  const std::size_t sub = res.windows == 0 ? 1 : std::max<std::size_t>(2, static_cast<std::size_t>(std::ceil(res.window / dt - 1e-12)));
  const double h = res.window / static_cast<double>(sub);

  auto generator = [&](const DenseMatrix& U) {
    DenseMatrix g = H * U;
    if (spec.lambda != 0.0) {
      const auto rows = U.middleRows(s0, static_cast<Eigen::Index>(N));
      RVector occ(static_cast<Eigen::Index>(N));
      for (Eigen::Index k = 0; k < occ.size(); ++k) occ(k) = (rows.row(k) * rho_i * rows.row(k).adjoint())(0, 0).real();
      const RVector v = hartree_diagonal(occ, spec);
      for (Eigen::Index k = 0; k < v.size(); ++k) g.row(s0 + k) += v(k) * U.row(s0 + k);
    }
    return g;
  };

  DenseMatrix U = DenseMatrix::Identity(D, D);
  std::vector<DenseMatrix> nodes(sub + 1);
  std::vector<DenseMatrix> gvals(sub + 1);
  std::vector<DenseMatrix> integral;
  for (std::size_t w = 0; w < res.windows; ++w) {
    std::fill(nodes.begin(), nodes.end(), U);
    double previous = 0.0;
    bool converged = false;
    for (std::size_t it = 1; it <= options.max_iterations; ++it) {
      for (std::size_t k = 0; k <= sub; ++k) gvals[k] = generator(nodes[k]);
      cumulative_simpson(gvals, h, integral);
      double change = 0.0;
      for (std::size_t k = 1; k <= sub; ++k) {
        DenseMatrix next = U - kI * integral[k];
        change = std::max(change, (next - nodes[k]).cwiseAbs().maxCoeff());
        nodes[k] = std::move(next);
      }
      if (it > 1 && previous > 1e3 * options.tol) {
        const double ratio = change / previous;
        res.max_contraction_ratio = std::max(res.max_contraction_ratio, ratio);
        if (ratio > 0.95) {
          throw WindowTooLarge("Picard iteration ratio " + std::to_string(ratio) + " at window width " +
                               std::to_string(res.window));
        }
      }
      previous = change;
      res.max_iterations_used = std::max(res.max_iterations_used, it);
      if (change < options.tol) {
        converged = true;
        break;
      }
    }
    if (!converged) throw NoConvergence("Picard iteration did not converge within a window");
    U = nodes[sub];
  }
  res.U = U;
  res.rho = U * rho_i * U.adjoint();
  res.state = describe(spec, op, res.rho, t_end, rho_i.trace().real());
  res.state.unitarity_defect = (U.adjoint() * U - DenseMatrix::Identity(D, D)).cwiseAbs().maxCoeff();
  return res;
}

namespace {

struct Integrator {
  const SystemSpec& spec;
  const TruncatedOperator& op;
  SparseRows h;
  std::size_t sample0;
  bool orbitals;

  RVector occupations(const RowMatrix& y) const {
    RVector n(static_cast<Eigen::Index>(op.N));
    for (std::size_t k = 0; k < op.N; ++k) {
      const auto r = static_cast<Eigen::Index>(sample0 + k);
      n(static_cast<Eigen::Index>(k)) = orbitals ? y.row(r).squaredNorm() : y(r, r).real();
    }
    return n;
  }

  // Orbitals: -i H_V Y. Dense: -i [H_V, rho] = -i (X - X^dagger) with X = H_V rho.
  void rhs(const RowMatrix& y, RowMatrix& x, RowMatrix& out) const {
    const RVector v = spec.lambda == 0.0 ? RVector::Zero(static_cast<Eigen::Index>(op.N)) : hartree_diagonal(occupations(y), spec);
    apply_h(h, sample0, v, y, x);
    if (orbitals) {
      out = -kI * x;
    } else {
      out = -kI * (x - x.adjoint());
    }
  }
};

}  // namespace

Trajectory evolve_liouville(const SystemSpec& spec, std::size_t L, const DenseMatrix& rho_i, double t_end, double dt,
                            const EvolveOptions& options) {
  if (!(t_end >= 0.0) || !(dt > 0.0)) throw std::invalid_argument("invalid time parameters");
  const TruncatedOperator op = assemble_truncated(spec, L);
  const auto D = op.matrix.rows();
  if (rho_i.rows() != D || rho_i.cols() != D) throw std::invalid_argument("rho_i has wrong dimension");

  Trajectory traj;
  traj.recurrence_horizon = 0.8 * static_cast<double>(L) / (2.0 * spec.t_c);
  traj.recurrence_warning = t_end > traj.recurrence_horizon;

  // Orbital factorisation rho = sum_m d_m |phi_m><phi_m|.
  RowMatrix y;
  bool orbitals = options.method == LiouvilleMethod::Orbitals;
  if (options.method != LiouvilleMethod::Dense) {
    const Eigen::SelfAdjointEigenSolver<DenseMatrix> es(rho_i);
    std::vector<Eigen::Index> keep;
    for (Eigen::Index m = 0; m < D; ++m)
      if (es.eigenvalues()(m) > options.orbital_cutoff) keep.push_back(m);
    if (options.method == LiouvilleMethod::Auto) orbitals = 4 * keep.size() <= 3 * static_cast<std::size_t>(D);
    if (orbitals) {
      y.resize(D, static_cast<Eigen::Index>(keep.size()));
      for (std::size_t c = 0; c < keep.size(); ++c)
        y.col(static_cast<Eigen::Index>(c)) = std::sqrt(es.eigenvalues()(keep[c])) * es.eigenvectors().col(keep[c]);
    }
  }
  if (!orbitals) y = rho_i;
  traj.method = orbitals ? "orbitals" : "dense";
  traj.orbitals = orbitals ? static_cast<std::size_t>(y.cols()) : 0;

  const Integrator f{spec, op, compress(op.matrix), op.sample_index(0), orbitals};
  const double trace0 = rho_i.trace().real();
  const double stride = options.output_stride > 0.0 ? options.output_stride : 0.5 / spec.t_c;
  const auto per_output = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(stride / dt)));
  const auto steps = static_cast<std::size_t>(std::llround(t_end / dt));
  const double h = steps == 0 ? 0.0 : t_end / static_cast<double>(steps);

  auto record = [&](double t) {
    EvolutionState s;
    s.t = t;
    s.occupations = f.occupations(y);
    Complex form{};
    for (const auto& e : spec.L1) {
      const auto a = static_cast<Eigen::Index>(op.lead_index(0, e.site));
      for (Eigen::Index k = 0; k < spec.S1.size(); ++k) {
        const auto sk = static_cast<Eigen::Index>(op.sample_index(static_cast<std::size_t>(k)));
        // rho(a, k) = sum_m y(a, m) conj(y(k, m)); dot() conjugates its left operand.
        const Complex rho_ak = orbitals ? Complex(y.row(sk).dot(y.row(a))) : y(a, sk);
        form += std::conj(e.amplitude) * rho_ak * spec.S1(k);
      }
    }
    s.current = -2.0 * spec.tau * form.imag();
    const double tr = orbitals ? y.squaredNorm() : y.trace().real();
    s.trace_defect = std::abs(tr - trace0);
    s.hermiticity_defect = orbitals ? 0.0 : (y - y.adjoint()).cwiseAbs().maxCoeff();
    traj.states.push_back(std::move(s));
  };

  RowMatrix k(y.rows(), y.cols()), x(y.rows(), y.cols()), tmp(y.rows(), y.cols()), acc(y.rows(), y.cols());
  record(0.0);
  for (std::size_t step = 1; step <= steps; ++step) {
    f.rhs(y, x, k);
    acc = y + (h / 6.0) * k;
    tmp = y + (h / 2.0) * k;
    f.rhs(tmp, x, k);
    acc += (h / 3.0) * k;
    tmp = y + (h / 2.0) * k;
    f.rhs(tmp, x, k);
    acc += (h / 3.0) * k;
    tmp = y + h * k;
    f.rhs(tmp, x, k);
    y = acc + (h / 6.0) * k;
    if (step % per_output == 0 || step == steps) record(h * static_cast<double>(step));
  }
  if (options.keep_final) traj.final_rho = orbitals ? DenseMatrix(y * y.adjoint()) : DenseMatrix(y);
  return traj;
}

PlateauReport plateau(const Trajectory& trajectory, double fraction, double drift_tol, double current_scale) {
  const auto& st = trajectory.states;
  if (st.size() < 4) throw NoPlateau("trajectory too short for a plateau estimate");
  const double t_end = st.back().t;
  const double t_start = t_end - fraction * (t_end - st.front().t);
  std::vector<const EvolutionState*> window;
  for (const auto& s : st)
    if (s.t >= t_start) window.push_back(&s);
  if (window.size() < 4) throw NoPlateau("plateau window holds fewer than four samples");
  const std::size_t half = window.size() / 2;
  auto mean = [&](std::size_t a, std::size_t b, auto&& get) {
    double s = 0.0;
    for (std::size_t i = a; i < b; ++i) s += get(*window[i]);
    return s / static_cast<double>(b - a);
  };
  PlateauReport r;
  const auto N = window.front()->occupations.size();
  r.occupations.resize(N);
  double drift = 0.0;
  for (Eigen::Index k = 0; k < N; ++k) {
    auto get = [k](const EvolutionState& s) { return s.occupations(k); };
    r.occupations(k) = mean(0, window.size(), get);
    const double d = std::abs(mean(half, window.size(), get) - mean(0, half, get));
    drift = std::max(drift, d / std::max(std::abs(r.occupations(k)), 1e-2));
  }
  auto cur = [](const EvolutionState& s) { return s.current; };
  r.current = mean(0, window.size(), cur);
  const double dc = std::abs(mean(half, window.size(), cur) - mean(0, half, cur));
  drift = std::max(drift, dc / std::max({std::abs(r.current), current_scale, 1e-300}));
  r.drift = drift;
  if (drift > drift_tol) {
    throw NoPlateau("observables drift by " + std::to_string(drift) + " (relative) over the plateau window");
  }
  return r;
}

DiagnosticsReport steady_diagnostics(const Trajectory& trajectory, double ness_current, const RVector& ness_occupations,
                                     const Trajectory* second_initialization, double fraction, double drift_tol) {
  DiagnosticsReport d;
  const double scale = std::max(std::abs(ness_current), 1e-12);
  d.plateau = plateau(trajectory, fraction, drift_tol, scale);
  d.ness_current = ness_current;
  d.ness_occupations = ness_occupations;
  d.current_relative_error = std::abs(d.plateau.current - ness_current) / scale;
  if (ness_occupations.size() == d.plateau.occupations.size())
    d.occupation_deviation = (d.plateau.occupations - ness_occupations).cwiseAbs().maxCoeff();
  if (second_initialization != nullptr) {
    const PlateauReport other = plateau(*second_initialization, fraction, drift_tol, scale);
    d.rho_s_deviation = (other.occupations - d.plateau.occupations).cwiseAbs().maxCoeff();
  }
  return d;
}

}  // namespace nesslab

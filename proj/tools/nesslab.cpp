// Copyright 2026 The nesslab Authors
// SPDX-License-Identifier: Apache-2.0

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "nesslab/acceptance.hpp"
#include "nesslab/config.hpp"
#include "nesslab/dynamics.hpp"
#include "nesslab/equilibrium.hpp"
#include "nesslab/errors.hpp"
#include "nesslab/greens.hpp"
#include "nesslab/kernels.hpp"
#include "nesslab/ness.hpp"
#include "nesslab/table.hpp"

#ifndef NESSLAB_VERSION
#define NESSLAB_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;
using namespace nesslab;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;
constexpr int kExitAcceptance = 4;

const char* kUnits = "energies and chemical potentials in units of t_c; current in 2 pi-absorbed units";

std::string number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// Collects output files and phase timings, then writes manifest.json.
class Run {
 public:
  Run(std::string command, RunConfig config) : command_(std::move(command)), config_(std::move(config)) {
    fs::create_directories(config_.outputs.directory);
  }

  const RunConfig& config() const { return config_; }

  void save(const std::string& name, Table table) {
    table.meta("command", command_);
    table.meta("config_hash", fnv1a_hex(config_.canonical));
    table.meta("units", kUnits);
    table.save((fs::path(config_.outputs.directory) / name).string());
    files_.push_back(name);
  }

  template <class F>
  auto timed(const std::string& phase, F&& f) {
    const auto start = std::chrono::steady_clock::now();
    auto result = f();
    timings_[phase] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
  }

  void manifest(const std::string& status) const {
    nlohmann::json m;
    m["command"] = command_;
    m["status"] = status;
    m["version"] = NESSLAB_VERSION;
    m["schema"] = 1;
    m["config_hash"] = fnv1a_hex(config_.canonical);
    m["simd"] = kernels::isa_name(kernels::active_isa());
    m["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                 std::to_string(EIGEN_MINOR_VERSION);
    m["outputs"] = files_;
    m["timings_seconds"] = timings_;
    std::ofstream f(fs::path(config_.outputs.directory) / "manifest.json");
    f << m.dump(2) << "\n";
  }

 private:
  std::string command_;
  RunConfig config_;
  std::vector<std::string> files_;
  std::map<std::string, double> timings_;
};

std::vector<double> parse_range(const std::string& text) {
  double a = 0.0, b = 0.0;
  std::size_t n = 0;
  char c1 = 0, c2 = 0;
  std::istringstream is(text);
  if (!(is >> a >> c1 >> b >> c2 >> n) || c1 != ':' || c2 != ':' || n == 0)
    throw ConfigError("range must look like FROM:TO:POINTS, got '" + text + "'");
  std::vector<double> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(n == 1 ? a : a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
  return out;
}

void cmd_green(Run& run) {
  const auto& c = run.config();
  Table t({"E", "re_g", "im_g", "smin_S"});
  t.meta("n", std::to_string(c.green.n));
  t.meta("m", std::to_string(c.green.m));
  t.meta("t_c", number(c.system.t_c));
  run.timed("green", [&] {
    for (double E : c.green.energies) {
      const Complex g = dirichlet_green(c.green.n, c.green.m, E, c.system.t_c);
      t.add_row({E, g.real(), g.imag(), smallest_singular_value(E, c.system)});
    }
    return 0;
  });
  run.save("green.tsv", std::move(t));
}

void cmd_transmittance(Run& run, bool effective) {
  const auto& c = run.config();
  const NessProblem problem(c.system, ness_grid(c.system, c.ness.theta_nodes), c.ness.condition_threshold);
  const NessSolution sol = run.timed("solve_w", [&] { return solve_w(problem, c.ness); });
  const auto T = steady_transmittance(problem, sol);
  std::vector<std::string> cols{"E", "T0", "T_lambda"};
  std::vector<double> T_eff;
  if (effective) {
    cols.push_back("T_eff");
    T_eff = run.timed("effective", [&] { return effective_transmittance(problem, effective_hamiltonian(problem)).via_t_matrix; });
  }
  Table t(cols);
  t.meta("lambda", number(c.system.lambda));
  t.meta("sweeps", std::to_string(sol.sweeps));
  for (const auto& w : sol.warnings) std::cerr << "warning: " << w << "\n";
  for (std::size_t i = 0; i < T.size(); ++i) {
    std::vector<double> row{problem.grid().energy[i], problem.frame(i).transmittance0(), T[i]};
    if (effective) row.push_back(T_eff[i]);
    t.add_row(std::move(row));
  }
  run.save("transmittance.tsv", std::move(t));
}

void cmd_iv(Run& run, const std::vector<double>& mu2_values) {
  const auto& c = run.config();
  Table t({"bias", "mu2", "current"});
  t.meta("mu1", number(c.system.mu1));
  t.meta("lambda", number(c.system.lambda));
  run.timed("sweep", [&] {
    for (double mu2 : mu2_values) {
      SystemSpec spec = c.system;
      spec.mu2 = mu2;
      const NessProblem problem(spec, ness_grid(spec, c.ness.theta_nodes), c.ness.condition_threshold);
      const NessSolution sol = solve_w(problem, c.ness);
      t.add_row({mu2 - spec.mu1, mu2, steady_current(spec, problem.grid(), steady_transmittance(problem, sol))});
    }
    return 0;
  });
  run.save("iv.tsv", std::move(t));
}

SteadyStateResult steady_state(Run& run) {
  const auto& c = run.config();
  const NessProblem problem(c.system, ness_grid(c.system, c.ness.theta_nodes), c.ness.condition_threshold);
  return run.timed("ness", [&] { return run_ness(problem, c.ness); });
}

void cmd_ness(Run& run) {
  const auto& c = run.config();
  const NessProblem problem(c.system, ness_grid(c.system, c.ness.theta_nodes), c.ness.condition_threshold);
  const SteadyStateResult res = run.timed("ness", [&] { return run_ness(problem, c.ness); });
  for (const auto& w : res.solution.warnings) std::cerr << "warning: " << w << "\n";

  Table occ({"site", "occupation", "occupation_lambda0"});
  occ.meta("current_1", number(res.current_1));
  occ.meta("current_0", number(res.current_0));
  occ.meta("current_eff", number(res.current_eff));
  occ.meta("sweeps", std::to_string(res.solution.sweeps));
  occ.meta("contraction_ratio", number(res.solution.contraction_ratio));
  for (Eigen::Index k = 0; k < res.occupations.size(); ++k)
    occ.add_row({static_cast<double>(k), res.occupations(k), res.effective.s(k)});
  run.save("ness_occupations.tsv", std::move(occ));

  Table tr({"E", "weight", "T0", "T_lambda", "T_eff"});
  for (std::size_t i = 0; i < problem.grid().size(); ++i)
    tr.add_row({problem.grid().energy[i], problem.grid().weight[i], res.transmittance0[i], res.transmittance[i],
                res.transmittance_eff[i]});
  run.save("ness_transmittance.tsv", std::move(tr));

  Table res_table({"sweep", "residual"});
  for (std::size_t i = 0; i < res.solution.residuals.size(); ++i)
    res_table.add_row({static_cast<double>(i + 1), res.solution.residuals[i]});
  run.save("ness_residuals.tsv", std::move(res_table));
}

void cmd_evolve(Run& run) {
  const auto& c = run.config();
  const auto& d = c.dynamics;
  const SampleMatrix rho_s =
      d.rho_s ? *d.rho_s : run.timed("equilibrium", [&] { return solve_sample_equilibrium(c.system).rho_s; });
  const SteadyStateResult ness = steady_state(run);
  EvolveOptions opts;
  opts.output_stride = d.output_stride;
  const Trajectory traj = run.timed("evolve", [&] {
    return evolve_liouville(c.system, d.L, initial_state_truncated(c.system, d.L, rho_s), d.t_end, d.dt, opts);
  });
  if (traj.recurrence_warning)
    std::cerr << "warning: t_end exceeds the recurrence horizon " << traj.recurrence_horizon << "\n";

  std::vector<std::string> cols{"t"};
  const auto N = static_cast<Eigen::Index>(c.system.dim());
  for (Eigen::Index k = 0; k < N; ++k) cols.push_back("n" + std::to_string(k));
  for (const char* s : {"current", "trace_defect", "hermiticity_defect"}) cols.push_back(s);
  Table series(cols);
  series.meta("L", std::to_string(d.L));
  series.meta("dt", number(d.dt));
  series.meta("method", traj.method);
  series.meta("recurrence_horizon", number(traj.recurrence_horizon));
  for (const auto& s : traj.states) {
    std::vector<double> row{s.t};
    for (Eigen::Index k = 0; k < N; ++k) row.push_back(s.occupations(k));
    row.insert(row.end(), {s.current, s.trace_defect, s.hermiticity_defect});
    series.add_row(std::move(row));
  }
  run.save("evolve.tsv", std::move(series));

  const DiagnosticsReport rep = steady_diagnostics(traj, ness.current_1, ness.occupations);
  Table cmp({"site", "plateau_occupation", "ness_occupation"});
  cmp.meta("plateau_current", number(rep.plateau.current));
  cmp.meta("ness_current", number(rep.ness_current));
  cmp.meta("current_relative_error", number(rep.current_relative_error));
  cmp.meta("occupation_deviation", number(rep.occupation_deviation));
  cmp.meta("drift", number(rep.plateau.drift));
  for (Eigen::Index k = 0; k < N; ++k)
    cmp.add_row({static_cast<double>(k), rep.plateau.occupations(k), rep.ness_occupations(k)});
  run.save("evolve_report.tsv", std::move(cmp));
}

int cmd_verify(Run& run, const std::vector<std::string>& only) {
  Table t({"index", "passed", "informational", "seconds"});
  std::size_t index = 0;
  const auto results = run.timed("verify", [&] {
    return run_acceptance({only}, [&](const CheckResult& r) {
      std::printf("%s %-8s %s: %s\n", r.informational ? "INFO" : (r.passed ? "PASS" : "FAIL"), r.id.c_str(),
                  r.title.c_str(), r.detail.c_str());
      std::fflush(stdout);
    });
  });
  for (const auto& r : results) {
    t.meta(r.id, r.detail);
    t.add_row({static_cast<double>(index++), r.passed ? 1.0 : 0.0, r.informational ? 1.0 : 0.0, r.seconds});
  }
  run.save("acceptance.tsv", std::move(t));
  return acceptance_passed(results) ? kExitOk : kExitAcceptance;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Steady states of weakly interacting open quantum samples"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string config_path;
  std::string out_dir;
  app.add_option("--config", config_path, "JSON run configuration (schema 1)");
  app.add_option("--out", out_dir, "output directory (created if missing)");

  auto* green = app.add_subcommand("green", "Dirichlet lead Green function and S(E) margin");
  std::size_t gn = 0, gm = 0;
  std::string e_range;
  auto* gn_opt = green->add_option("--n", gn, "first site");
  auto* gm_opt = green->add_option("--m", gm, "second site");
  green->add_option("--energy-range", e_range, "FROM:TO:POINTS");

  auto* trans = app.add_subcommand("transmittance", "transmittance on the steady-state grid");
  double lambda = 0.0;
  bool effective = false;
  auto* lambda_opt = trans->add_option("--lambda", lambda, "interaction strength");
  trans->add_flag("--effective", effective, "add the effective Hamiltonian column");

  auto* iv = app.add_subcommand("iv", "current against mu2 at fixed mu1");
  std::string mu2_range;
  iv->add_option("--mu2-range", mu2_range, "FROM:TO:POINTS");
  auto* iv_lambda = iv->add_option("--lambda", lambda, "interaction strength");

  auto* ness = app.add_subcommand("ness", "interacting steady state");
  auto* ness_lambda = ness->add_option("--lambda", lambda, "interaction strength");
  auto* evolve = app.add_subcommand("evolve", "time evolution on truncated leads compared with the steady state");

  auto* verify = app.add_subcommand("verify", "acceptance battery");
  bool list = false;
  std::vector<std::string> only;
  verify->add_flag("--list", list, "print check ids without running");
  verify->add_option("--only", only, "run only this check id (repeatable)")->allow_extra_args(false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  if (verify->parsed() && list) {
    for (const auto& c : acceptance_checks()) std::printf("%s\t%s\n", c.id.c_str(), c.title.c_str());
    return kExitOk;
  }

  try {
    RunConfig config = config_path.empty() ? default_config() : load_config(config_path);
    if (config.canonical.empty()) config.canonical = "{\"schema\":1}";
    if (!out_dir.empty()) config.outputs.directory = out_dir;
    if (*gn_opt) config.green.n = gn;
    if (*gm_opt) config.green.m = gm;
    if (!e_range.empty()) config.green.energies = parse_range(e_range);
    if (*lambda_opt || *iv_lambda || *ness_lambda) {
      if (!(lambda >= 0.0)) throw ConfigError("--lambda must be nonnegative");
      config.system.lambda = lambda;
    }
    std::vector<double> mu2_values = mu2_range.empty() ? config.iv.mu2 : parse_range(mu2_range);
    config.system.validate();

    const std::string name = app.get_subcommands().front()->get_name();
    Run run(name, std::move(config));
    int code = kExitOk;
    try {
      if (green->parsed()) cmd_green(run);
      if (trans->parsed()) cmd_transmittance(run, effective);
      if (iv->parsed()) cmd_iv(run, mu2_values);
      if (ness->parsed()) cmd_ness(run);
      if (evolve->parsed()) cmd_evolve(run);
      if (verify->parsed()) code = cmd_verify(run, only);
    } catch (...) {
      run.manifest("error");
      throw;
    }
    run.manifest(code == kExitOk ? "ok" : "acceptance_failure");
    return code;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSolver;
  }
}

// Copyright 2026 The nesslab Authors
// SPDX-License-Identifier: Apache-2.0

#include "nesslab/config.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "nesslab/errors.hpp"

namespace nesslab {

namespace {

using json = nlohmann::json;

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [k, v] : obj.items()) {
    if (!allowed.count(k)) throw ConfigError("unknown key '" + k + "' in " + where);
  }
}

double number(const json& v, const std::string& what) {
  if (!v.is_number()) throw ConfigError(what + " must be a number");
  return v.get<double>();
}

// A number, "inf", or "infinity".
double extended(const json& v, const std::string& what) {
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "inf" || s == "infinity") return kInfinity;
    throw ConfigError(what + " must be a number or \"inf\"");
  }
  return number(v, what);
}

// A real number or a [re, im] pair.
Complex complex_value(const json& v, const std::string& what) {
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
    return {v[0].get<double>(), v[1].get<double>()};
  throw ConfigError(what + " must be a number or a [re, im] pair");
}

CVector complex_vector(const json& v, const std::string& what) {
  if (!v.is_array() || v.empty()) throw ConfigError(what + " must be a non-empty array");
  CVector out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out(static_cast<Eigen::Index>(i)) = complex_value(v[i], what);
  return out;
}

SampleMatrix complex_matrix(const json& v, const std::string& what) {
  if (!v.is_array() || v.empty()) throw ConfigError(what + " must be a non-empty array of rows");
  const std::size_t n = v.size();
  SampleMatrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t r = 0; r < n; ++r) {
    if (!v[r].is_array() || v[r].size() != n) throw ConfigError(what + " must be square");
    for (std::size_t c = 0; c < n; ++c)
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = complex_value(v[r][c], what);
  }
  return m;
}

RealMatrix real_matrix(const json& v, const std::string& what) {
  const SampleMatrix m = complex_matrix(v, what);
  if (m.imag().cwiseAbs().maxCoeff() != 0.0) throw ConfigError(what + " must be real");
  return m.real();
}

LeadVector lead_vector(const json& v, const std::string& what) {
  if (!v.is_array() || v.empty()) throw ConfigError(what + " must be a non-empty array of {site, amplitude}");
  LeadVector out;
  for (const auto& e : v) {
    check_keys(e, {"site", "amplitude"}, what);
    if (!e.contains("site") || !e["site"].is_number_unsigned()) throw ConfigError(what + ": site must be a nonnegative integer");
    out.push_back({e["site"].get<std::size_t>(), e.contains("amplitude") ? complex_value(e["amplitude"], what) : Complex(1.0)});
  }
  return out;
}

std::size_t count(const json& v, const std::string& what) {
  if (!v.is_number_unsigned()) throw ConfigError(what + " must be a nonnegative integer");
  return v.get<std::size_t>();
}

std::vector<double> energy_list(const json& v, const std::string& what) {
  std::vector<double> out;
  if (v.is_array()) {
    for (const auto& e : v) out.push_back(number(e, what));
    return out;
  }
  check_keys(v, {"from", "to", "points"}, what);
  if (!v.contains("from") || !v.contains("to") || !v.contains("points")) throw ConfigError(what + " sweep needs from, to, points");
  const double a = number(v["from"], what);
  const double b = number(v["to"], what);
  const std::size_t p = count(v["points"], what);
  for (std::size_t i = 0; i < p; ++i) out.push_back(p == 1 ? a : a + (b - a) * static_cast<double>(i) / static_cast<double>(p - 1));
  return out;
}

void read_system(const json& s, SystemSpec& spec) {
  check_keys(s, {"t_c", "tau", "h_s", "nu", "lambda", "S1", "S2", "L1", "L2", "beta1", "beta2", "mu1", "mu2", "beta_s",
                 "n_particles"},
             "system");
  if (s.contains("t_c")) spec.t_c = number(s["t_c"], "system.t_c");
  if (s.contains("tau")) spec.tau = number(s["tau"], "system.tau");
  if (s.contains("h_s")) {
    spec.h_s = complex_matrix(s["h_s"], "system.h_s");
    const auto n = spec.h_s.rows();
    if (!s.contains("nu")) spec.nu = RealMatrix::Identity(n, n);
    if (!s.contains("S1")) spec.S1 = CVector::Ones(n);
    if (!s.contains("S2")) spec.S2 = CVector::Ones(n);
    if (!s.contains("n_particles")) spec.n_particles = 0.5 * static_cast<double>(n);
  }
  if (s.contains("nu")) spec.nu = real_matrix(s["nu"], "system.nu");
  if (s.contains("lambda")) spec.lambda = number(s["lambda"], "system.lambda");
  if (s.contains("S1")) spec.S1 = complex_vector(s["S1"], "system.S1");
  if (s.contains("S2")) spec.S2 = complex_vector(s["S2"], "system.S2");
  if (s.contains("L1")) spec.L1 = lead_vector(s["L1"], "system.L1");
  if (s.contains("L2")) spec.L2 = lead_vector(s["L2"], "system.L2");
  if (s.contains("beta1")) spec.beta1 = extended(s["beta1"], "system.beta1");
  if (s.contains("beta2")) spec.beta2 = extended(s["beta2"], "system.beta2");
  if (s.contains("mu1")) spec.mu1 = number(s["mu1"], "system.mu1");
  if (s.contains("mu2")) spec.mu2 = number(s["mu2"], "system.mu2");
  if (s.contains("beta_s")) spec.beta_s = number(s["beta_s"], "system.beta_s");
  if (s.contains("n_particles")) spec.n_particles = number(s["n_particles"], "system.n_particles");
}

}  // namespace

RunConfig default_config() {
  RunConfig c;
  c.system = single_dot(0.5, 0.5);
  c.system.mu1 = -0.1;
  c.system.mu2 = 0.1;
  c.green.energies = {-3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0};
  for (int i = 0; i <= 20; ++i) c.iv.mu2.push_back(-0.1 + 0.02 * i);
  return c;
}

RunConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  check_keys(doc, {"schema", "system", "grid", "ness", "dynamics", "green", "iv", "outputs"}, "config");
  if (!doc.contains("schema") || !doc["schema"].is_number_integer() || doc["schema"].get<int>() != 1)
    throw ConfigError("config must declare \"schema\": 1");

  RunConfig c = default_config();
  if (doc.contains("system")) read_system(doc["system"], c.system);
  if (doc.contains("grid")) {
    check_keys(doc["grid"], {"theta_nodes"}, "grid");
    if (doc["grid"].contains("theta_nodes")) c.ness.theta_nodes = count(doc["grid"]["theta_nodes"], "grid.theta_nodes");
  }
  if (c.ness.theta_nodes < 64) throw ConfigError("grid.theta_nodes must be at least 64");
  if (doc.contains("ness")) {
    const auto& n = doc["ness"];
    check_keys(n, {"tol", "max_sweeps", "mixing", "condition_threshold"}, "ness");
    if (n.contains("tol")) c.ness.tol = number(n["tol"], "ness.tol");
    if (n.contains("max_sweeps")) c.ness.max_sweeps = count(n["max_sweeps"], "ness.max_sweeps");
    if (n.contains("mixing")) c.ness.mixing = number(n["mixing"], "ness.mixing");
    if (n.contains("condition_threshold")) c.ness.condition_threshold = number(n["condition_threshold"], "ness.condition_threshold");
    if (!(c.ness.tol > 0.0) || !(c.ness.mixing > 0.0 && c.ness.mixing <= 1.0)) throw ConfigError("ness.tol must be positive and ness.mixing in (0, 1]");
  }
  if (doc.contains("dynamics")) {
    const auto& d = doc["dynamics"];
    check_keys(d, {"L", "dt", "t_end", "output_stride", "rho_s"}, "dynamics");
    if (d.contains("L")) c.dynamics.L = count(d["L"], "dynamics.L");
    if (d.contains("dt")) c.dynamics.dt = number(d["dt"], "dynamics.dt");
    if (d.contains("t_end")) c.dynamics.t_end = number(d["t_end"], "dynamics.t_end");
    if (d.contains("output_stride")) c.dynamics.output_stride = number(d["output_stride"], "dynamics.output_stride");
    if (d.contains("rho_s")) c.dynamics.rho_s = complex_matrix(d["rho_s"], "dynamics.rho_s");
    if (!(c.dynamics.dt > 0.0) || !(c.dynamics.t_end >= 0.0) || !(c.dynamics.output_stride > 0.0))
      throw ConfigError("dynamics.dt and output_stride must be positive, t_end nonnegative");
  }
  if (doc.contains("green")) {
    const auto& g = doc["green"];
    check_keys(g, {"n", "m", "energies"}, "green");
    if (g.contains("n")) c.green.n = count(g["n"], "green.n");
    if (g.contains("m")) c.green.m = count(g["m"], "green.m");
    if (g.contains("energies")) c.green.energies = energy_list(g["energies"], "green.energies");
  }
  if (doc.contains("iv")) {
    check_keys(doc["iv"], {"mu2"}, "iv");
    if (doc["iv"].contains("mu2")) c.iv.mu2 = energy_list(doc["iv"]["mu2"], "iv.mu2");
  }
  if (doc.contains("outputs")) {
    const auto& o = doc["outputs"];
    check_keys(o, {"directory", "formats"}, "outputs");
    if (o.contains("directory")) {
      if (!o["directory"].is_string()) throw ConfigError("outputs.directory must be a string");
      c.outputs.directory = o["directory"].get<std::string>();
    }
    if (o.contains("formats")) {
      c.outputs.formats.clear();
      for (const auto& f : o["formats"]) {
        if (!f.is_string() || f.get<std::string>() != "tsv") throw ConfigError("only the \"tsv\" output format is supported");
        c.outputs.formats.push_back("tsv");
      }
    }
  }
  if (c.dynamics.rho_s && c.dynamics.rho_s->rows() != c.system.h_s.rows())
    throw ConfigError("dynamics.rho_s must be N x N");
  c.system.validate();
  c.canonical = doc.dump();
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read config file " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

std::string fnv1a_hex(const std::string& data) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char ch : data) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace nesslab

// Copyright 2026 The nesslab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nesslab/model.hpp"
#include "nesslab/ness.hpp"

namespace nesslab {

struct DynamicsConfig {
  std::size_t L = 600;
  double dt = 0.1;
  double t_end = 200.0;
  double output_stride = 0.5;
  std::optional<SampleMatrix> rho_s;  ///< absent: solve the sample equilibrium
};

struct GreenConfig {
  std::size_t n = 0;
  std::size_t m = 0;
  std::vector<double> energies;
};

struct IvConfig {
  std::vector<double> mu2;
};

struct OutputConfig {
  std::string directory = "nesslab_out";
  std::vector<std::string> formats{"tsv"};
};

struct RunConfig {
  SystemSpec system;
  NessOptions ness;
  DynamicsConfig dynamics;
  GreenConfig green;
  IvConfig iv;
  OutputConfig outputs;
  std::string canonical;  ///< normalized JSON text of the input
};

/// Parses a JSON document with "schema": 1. Throws ConfigError.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

/// Default single-dot configuration (alpha = 0.5, tau = 0.5, mu = -/+ 0.1).
RunConfig default_config();

/// 64-bit FNV-1a hash rendered as 16 hex digits.
std::string fnv1a_hex(const std::string& data);

}  // namespace nesslab

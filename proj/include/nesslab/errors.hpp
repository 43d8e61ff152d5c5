// Copyright 2026 The nesslab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace nesslab {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid system or run configuration (CLI exit code 2).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// S(E) is numerically singular at `energy`; the spectral hypothesis fails there.
class SingularS : public Error {
 public:
  SingularS(double energy, double condition)
      : Error("S(E) singular at E=" + std::to_string(energy) +
              " (cond=" + std::to_string(condition) + ")"),
        energy_(energy),
        condition_(condition) {}
  double energy() const noexcept { return energy_; }
  double condition() const noexcept { return condition_; }

 private:
  double energy_;
  double condition_;
};

class NoConvergence : public Error {
 public:
  using Error::Error;
};

class NonDecayingPropagator : public Error {
 public:
  using Error::Error;
};

class NotEquilibrium : public Error {
 public:
  using Error::Error;
};

class WindowTooLarge : public Error {
 public:
  using Error::Error;
};

class NoPlateau : public Error {
 public:
  using Error::Error;
};

}  // namespace nesslab

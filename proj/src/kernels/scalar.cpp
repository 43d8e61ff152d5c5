// Copyright 2026 The nesslab Authors
// SPDX-License-Identifier: Apache-2.0

#include "nesslab/kernels.hpp"

namespace nesslab::kernels {
namespace {

void caxpy_scalar(std::size_t n, Complex a, const Complex* x, Complex* y) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

Complex cdotu_scalar(std::size_t n, const Complex* x, const Complex* y) {
  double re = 0.0, im = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    re += x[i].real() * y[i].real() - x[i].imag() * y[i].imag();
    im += x[i].real() * y[i].imag() + x[i].imag() * y[i].real();
  }
  return {re, im};
}

void cmul_inplace_scalar(std::size_t n, Complex* x, const Complex* y) {
  for (std::size_t i = 0; i < n; ++i) {
    const double re = x[i].real() * y[i].real() - x[i].imag() * y[i].imag();
    const double im = x[i].real() * y[i].imag() + x[i].imag() * y[i].real();
    x[i] = {re, im};
  }
}

double weighted_abs2_scalar(std::size_t n, const double* w, const Complex* v) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += w[i] * (v[i].real() * v[i].real() + v[i].imag() * v[i].imag());
  return s;
}

}  // namespace

namespace detail {
const KernelTable scalar_table{caxpy_scalar, cdotu_scalar, cmul_inplace_scalar, weighted_abs2_scalar};
}

}  // namespace nesslab::kernels

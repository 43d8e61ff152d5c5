// Copyright 2026 The nesslab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <cstddef>

namespace nesslab::kernels {

using Complex = std::complex<double>;

enum class Isa { Scalar, Avx2, Neon };

struct KernelTable {
  /// y[i] += a * x[i]
  void (*caxpy)(std::size_t n, Complex a, const Complex* x, Complex* y);
  /// sum_i x[i] * y[i] (no conjugation)
  Complex (*cdotu)(std::size_t n, const Complex* x, const Complex* y);
  /// x[i] *= y[i]
  void (*cmul_inplace)(std::size_t n, Complex* x, const Complex* y);
  /// sum_i w[i] * |v[i]|^2
  double (*weighted_abs2)(std::size_t n, const double* w, const Complex* v);
};

const char* isa_name(Isa isa);

/// True when the variant was compiled in and the CPU supports it.
bool available(Isa isa);

/// Throws std::runtime_error for an unavailable variant.
const KernelTable& table(Isa isa);

/// Best available variant, chosen once. NESSLAB_SIMD=scalar|avx2|neon overrides.
Isa active_isa();
const KernelTable& active();

inline void caxpy(std::size_t n, Complex a, const Complex* x, Complex* y) { active().caxpy(n, a, x, y); }
inline Complex cdotu(std::size_t n, const Complex* x, const Complex* y) { return active().cdotu(n, x, y); }
inline void cmul_inplace(std::size_t n, Complex* x, const Complex* y) { active().cmul_inplace(n, x, y); }
inline double weighted_abs2(std::size_t n, const double* w, const Complex* v) {
  return active().weighted_abs2(n, w, v);
}

namespace detail {
extern const KernelTable scalar_table;
#if defined(NESSLAB_HAVE_AVX2)
extern const KernelTable avx2_table;
#endif
#if defined(NESSLAB_HAVE_NEON)
extern const KernelTable neon_table;
#endif
}  // namespace detail

}  // namespace nesslab::kernels

// Copyright 2026 The nesslab Authors
// SPDX-License-Identifier: Apache-2.0

// Built with -mavx2 -mfma; only reached after a runtime CPU check.

#include <immintrin.h>

#include "nesslab/kernels.hpp"

namespace nesslab::kernels {
namespace {

// Two interleaved complex doubles per register: [re0, im0, re1, im1].
inline __m256d load2(const Complex* p) { return _mm256_loadu_pd(reinterpret_cast<const double*>(p)); }
inline void store2(Complex* p, __m256d v) { _mm256_storeu_pd(reinterpret_cast<double*>(p), v); }

inline __m256d cmul2(__m256d a, __m256d b) {
  const __m256d b_re = _mm256_movedup_pd(b);
  const __m256d b_im = _mm256_permute_pd(b, 0xF);
  const __m256d a_sw = _mm256_permute_pd(a, 0x5);
  return _mm256_fmaddsub_pd(a, b_re, _mm256_mul_pd(a_sw, b_im));
}

void caxpy_avx2(std::size_t n, Complex a, const Complex* x, Complex* y) {
  const __m256d a_re = _mm256_set1_pd(a.real());
  const __m256d a_im = _mm256_set1_pd(a.imag());
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d xv = load2(x + i);
    const __m256d t = _mm256_fmaddsub_pd(xv, a_re, _mm256_mul_pd(_mm256_permute_pd(xv, 0x5), a_im));
    store2(y + i, _mm256_add_pd(load2(y + i), t));
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

Complex cdotu_avx2(std::size_t n, const Complex* x, const Complex* y) {
  __m256d acc_a = _mm256_setzero_pd();  // [xr yr, xi yr]
  __m256d acc_b = _mm256_setzero_pd();  // [xi yi, xr yi]
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d xv = load2(x + i);
    const __m256d yv = load2(y + i);
    acc_a = _mm256_fmadd_pd(xv, _mm256_movedup_pd(yv), acc_a);
    acc_b = _mm256_fmadd_pd(_mm256_permute_pd(xv, 0x5), _mm256_permute_pd(yv, 0xF), acc_b);
  }
  alignas(32) double a[4];
  alignas(32) double b[4];
  _mm256_store_pd(a, acc_a);
  _mm256_store_pd(b, acc_b);
  double re = (a[0] + a[2]) - (b[0] + b[2]);
  double im = (a[1] + a[3]) + (b[1] + b[3]);
  for (; i < n; ++i) {
    re += x[i].real() * y[i].real() - x[i].imag() * y[i].imag();
    im += x[i].real() * y[i].imag() + x[i].imag() * y[i].real();
  }
  return {re, im};
}

void cmul_inplace_avx2(std::size_t n, Complex* x, const Complex* y) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) store2(x + i, cmul2(load2(x + i), load2(y + i)));
  for (; i < n; ++i) x[i] *= y[i];
}

double weighted_abs2_avx2(std::size_t n, const double* w, const Complex* v) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d vv = load2(v + i);
    const __m256d wd = _mm256_permute4x64_pd(_mm256_castpd128_pd256(_mm_loadu_pd(w + i)), 0x50);
    acc = _mm256_fmadd_pd(_mm256_mul_pd(vv, vv), wd, acc);
  }
  alignas(32) double a[4];
  _mm256_store_pd(a, acc);
  double s = (a[0] + a[1]) + (a[2] + a[3]);
  for (; i < n; ++i) s += w[i] * (v[i].real() * v[i].real() + v[i].imag() * v[i].imag());
  return s;
}

}  // namespace

namespace detail {
const KernelTable avx2_table{caxpy_avx2, cdotu_avx2, cmul_inplace_avx2, weighted_abs2_avx2};
}

}  // namespace nesslab::kernels

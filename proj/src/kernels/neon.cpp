// Copyright 2026 The nesslab Authors
// SPDX-License-Identifier: Apache-2.0

#include "nesslab/kernels.hpp"

#if defined(NESSLAB_HAVE_NEON)

#include <arm_neon.h>

namespace nesslab::kernels {
namespace {

// One complex double per register: [re, im].
inline float64x2_t load1(const Complex* p) { return vld1q_f64(reinterpret_cast<const double*>(p)); }
inline void store1(Complex* p, float64x2_t v) { vst1q_f64(reinterpret_cast<double*>(p), v); }

inline float64x2_t cmul1(float64x2_t a, float64x2_t b) {
  static const double sign_bits[2] = {-1.0, 1.0};
  const float64x2_t sign = vld1q_f64(sign_bits);
  const float64x2_t t1 = vmulq_laneq_f64(a, b, 0);
  const float64x2_t t2 = vmulq_laneq_f64(vextq_f64(a, a, 1), b, 1);
  return vfmaq_f64(t1, t2, sign);
}

void caxpy_neon(std::size_t n, Complex a, const Complex* x, Complex* y) {
  const float64x2_t av = load1(&a);
  for (std::size_t i = 0; i < n; ++i) store1(y + i, vaddq_f64(load1(y + i), cmul1(load1(x + i), av)));
}

Complex cdotu_neon(std::size_t n, const Complex* x, const Complex* y) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    acc0 = vaddq_f64(acc0, cmul1(load1(x + i), load1(y + i)));
    acc1 = vaddq_f64(acc1, cmul1(load1(x + i + 1), load1(y + i + 1)));
  }
  if (i < n) acc0 = vaddq_f64(acc0, cmul1(load1(x + i), load1(y + i)));
  const float64x2_t acc = vaddq_f64(acc0, acc1);
  return {vgetq_lane_f64(acc, 0), vgetq_lane_f64(acc, 1)};
}

void cmul_inplace_neon(std::size_t n, Complex* x, const Complex* y) {
  for (std::size_t i = 0; i < n; ++i) store1(x + i, cmul1(load1(x + i), load1(y + i)));
}

double weighted_abs2_neon(std::size_t n, const double* w, const Complex* v) {
  float64x2_t acc = vdupq_n_f64(0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const float64x2_t vv = load1(v + i);
    acc = vfmaq_n_f64(acc, vmulq_f64(vv, vv), w[i]);
  }
  return vaddvq_f64(acc);
}

}  // namespace

namespace detail {
const KernelTable neon_table{caxpy_neon, cdotu_neon, cmul_inplace_neon, weighted_abs2_neon};
}

}  // namespace nesslab::kernels

#endif

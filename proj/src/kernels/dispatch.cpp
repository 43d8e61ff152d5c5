// Copyright 2026 The nesslab Authors
// SPDX-License-Identifier: Apache-2.0

#include <cstdlib>
#include <stdexcept>
#include <string>

#include "nesslab/kernels.hpp"

namespace nesslab::kernels {

const char* isa_name(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
    case Isa::Neon: return "neon";
  }
  return "unknown";
}

bool available(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return true;
    case Isa::Avx2:
#if defined(NESSLAB_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Isa::Neon:
#if defined(NESSLAB_HAVE_NEON)
      return true;
#else
      return false;
#endif
  }
  return false;
}

const KernelTable& table(Isa isa) {
  if (!available(isa)) throw std::runtime_error(std::string("SIMD variant not available: ") + isa_name(isa));
  switch (isa) {
#if defined(NESSLAB_HAVE_AVX2)
    case Isa::Avx2: return detail::avx2_table;
#endif
#if defined(NESSLAB_HAVE_NEON)
    case Isa::Neon: return detail::neon_table;
#endif
    default: return detail::scalar_table;
  }
}

namespace {

Isa choose() {
  if (const char* env = std::getenv("NESSLAB_SIMD")) {
    const std::string v(env);
    if (v == "scalar") return Isa::Scalar;
    if (v == "avx2" && available(Isa::Avx2)) return Isa::Avx2;
    if (v == "neon" && available(Isa::Neon)) return Isa::Neon;
  }
  if (available(Isa::Avx2)) return Isa::Avx2;
  if (available(Isa::Neon)) return Isa::Neon;
  return Isa::Scalar;
}

}  // namespace

Isa active_isa() {
  static const Isa isa = choose();
  return isa;
}

const KernelTable& active() {
  static const KernelTable& t = table(active_isa());
  return t;
}

}  // namespace nesslab::kernels

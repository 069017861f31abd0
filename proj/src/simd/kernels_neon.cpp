/* Copyright 2026 The TIIL Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "tiil/simd.hpp"

#if defined(__aarch64__)
#include <arm_neon.h>

#include <cmath>

namespace tiil::simd::detail {
namespace {

void axpby_neon(double a, const double* x, double b, const double* y, double* out,
                std::size_t n) {
  const float64x2_t va = vdupq_n_f64(a);
  const float64x2_t vb = vdupq_n_f64(b);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t ax = vmulq_f64(va, vld1q_f64(x + i));
    const float64x2_t by = vmulq_f64(vb, vld1q_f64(y + i));
    vst1q_f64(out + i, vaddq_f64(ax, by));
  }
  for (; i < n; ++i) out[i] = a * x[i] + b * y[i];
}

void sub_scaled_div_neon(const double* x, double a, const double* y, double b, double* out,
                         std::size_t n) {
  const float64x2_t va = vdupq_n_f64(a);
  const float64x2_t vb = vdupq_n_f64(b);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t num = vsubq_f64(vld1q_f64(x + i), vmulq_f64(va, vld1q_f64(y + i)));
    vst1q_f64(out + i, vdivq_f64(num, vb));
  }
  for (; i < n; ++i) out[i] = (x[i] - a * y[i]) / b;
}

void axpy_neon(double a, const double* x, double* y, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(a);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    vst1q_f64(y + i, vaddq_f64(vld1q_f64(y + i), vmulq_f64(va, vld1q_f64(x + i))));
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

void abs_diff_accumulate_neon(const double* x, const double* y, double* acc, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t d = vabdq_f64(vld1q_f64(x + i), vld1q_f64(y + i));
    vst1q_f64(acc + i, vaddq_f64(vld1q_f64(acc + i), d));
  }
  for (; i < n; ++i) acc[i] += std::fabs(x[i] - y[i]);
}

double dot_neon(const double* x, const double* y, std::size_t n) {
  float64x2_t s = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) s = vaddq_f64(s, vmulq_f64(vld1q_f64(x + i), vld1q_f64(y + i)));
  double r = vaddvq_f64(s);
  for (; i < n; ++i) r += x[i] * y[i];
  return r;
}

double squared_distance_neon(const double* x, const double* y, std::size_t n) {
  float64x2_t s = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t d = vsubq_f64(vld1q_f64(x + i), vld1q_f64(y + i));
    s = vaddq_f64(s, vmulq_f64(d, d));
  }
  double r = vaddvq_f64(s);
  for (; i < n; ++i) {
    const double d = x[i] - y[i];
    r += d * d;
  }
  return r;
}

const KernelTable kNeonTable = {
    axpby_neon, sub_scaled_div_neon, axpy_neon, abs_diff_accumulate_neon,
    dot_neon,   squared_distance_neon,
};

}  // namespace

const KernelTable* neon_table() { return &kNeonTable; }

}  // namespace tiil::simd::detail

#else

namespace tiil::simd::detail {
const KernelTable* neon_table() { return nullptr; }
}  // namespace tiil::simd::detail

#endif

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

#pragma once

#include <cstddef>
#include <span>

// Vector kernels used by the inner loops of the pipeline. Each kernel has a
// scalar reference implementation and ISA-specific variants; the variant is
// picked once at startup from CPUID (override with TIIL_SIMD=scalar|avx2|neon).
//
// Elementwise kernels are bit-identical across variants (no FMA contraction).
// Reductions differ from the scalar reference only by summation order.

namespace tiil::simd {

enum class Isa { kScalar, kAvx2, kNeon };

struct KernelTable {
  // out = a*x + b*y
  void (*axpby)(double a, const double* x, double b, const double* y, double* out, std::size_t n);
  // out = (x - a*y) / b
  void (*sub_scaled_div)(const double* x, double a, const double* y, double b, double* out,
                         std::size_t n);
  // y += a*x
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
  // acc += |x - y|
  void (*abs_diff_accumulate)(const double* x, const double* y, double* acc, std::size_t n);
  double (*dot)(const double* x, const double* y, std::size_t n);
  double (*squared_distance)(const double* x, const double* y, std::size_t n);
};

const char* isa_name(Isa isa);
bool isa_supported(Isa isa);

// Table for a specific ISA. Throws std::invalid_argument if the host cannot run it.
const KernelTable& kernels_for(Isa isa);

// ISA selected for this process.
Isa active_isa();
const KernelTable& kernels();

namespace detail {
extern const KernelTable kScalarTable;
const KernelTable* avx2_table();  // nullptr when not compiled in
const KernelTable* neon_table();
}  // namespace detail

// Span front-ends over the active table. Sizes must match.
void axpby(double a, std::span<const double> x, double b, std::span<const double> y,
           std::span<double> out);
void sub_scaled_div(std::span<const double> x, double a, std::span<const double> y, double b,
                    std::span<double> out);
void axpy(double a, std::span<const double> x, std::span<double> y);
void abs_diff_accumulate(std::span<const double> x, std::span<const double> y,
                         std::span<double> acc);
double dot(std::span<const double> x, std::span<const double> y);
double squared_distance(std::span<const double> x, std::span<const double> y);
double squared_norm(std::span<const double> x);

}  // namespace tiil::simd

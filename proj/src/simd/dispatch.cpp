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

#include <cstdlib>
#include <stdexcept>
#include <string>
#include <string_view>

#include "tiil/simd.hpp"

namespace tiil::simd {

const char* isa_name(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return "scalar";
    case Isa::kAvx2:
      return "avx2";
    case Isa::kNeon:
      return "neon";
  }
  return "unknown";
}

bool isa_supported(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return true;
    case Isa::kAvx2:
#if defined(__x86_64__) || defined(__i386__)
      return detail::avx2_table() != nullptr && __builtin_cpu_supports("avx2");
#else
      return false;
#endif
    case Isa::kNeon:
      return detail::neon_table() != nullptr;
  }
  return false;
}

const KernelTable& kernels_for(Isa isa) {
  if (!isa_supported(isa)) {
    throw std::invalid_argument(std::string("SIMD variant not supported on this host: ") +
                                isa_name(isa));
  }
  switch (isa) {
    case Isa::kAvx2:
      return *detail::avx2_table();
    case Isa::kNeon:
      return *detail::neon_table();
    case Isa::kScalar:
      break;
  }
  return detail::kScalarTable;
}

namespace {

Isa detect_isa() {
  if (const char* env = std::getenv("TIIL_SIMD")) {
    const std::string_view v(env);
    if (v == "scalar") return Isa::kScalar;
    if (v == "avx2" && isa_supported(Isa::kAvx2)) return Isa::kAvx2;
    if (v == "neon" && isa_supported(Isa::kNeon)) return Isa::kNeon;
  }
  if (isa_supported(Isa::kAvx2)) return Isa::kAvx2;
  if (isa_supported(Isa::kNeon)) return Isa::kNeon;
  return Isa::kScalar;
}

void check_sizes(std::size_t a, std::size_t b) {
  if (a != b) throw std::invalid_argument("simd kernel: operand size mismatch");
}

}  // namespace

Isa active_isa() {
  static const Isa isa = detect_isa();
  return isa;
}

const KernelTable& kernels() {
  static const KernelTable& table = kernels_for(active_isa());
  return table;
}

void axpby(double a, std::span<const double> x, double b, std::span<const double> y,
           std::span<double> out) {
  check_sizes(x.size(), y.size());
  check_sizes(x.size(), out.size());
  kernels().axpby(a, x.data(), b, y.data(), out.data(), x.size());
}

void sub_scaled_div(std::span<const double> x, double a, std::span<const double> y, double b,
                    std::span<double> out) {
  check_sizes(x.size(), y.size());
  check_sizes(x.size(), out.size());
  kernels().sub_scaled_div(x.data(), a, y.data(), b, out.data(), x.size());
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
  check_sizes(x.size(), y.size());
  kernels().axpy(a, x.data(), y.data(), x.size());
}

void abs_diff_accumulate(std::span<const double> x, std::span<const double> y,
                         std::span<double> acc) {
  check_sizes(x.size(), y.size());
  check_sizes(x.size(), acc.size());
  kernels().abs_diff_accumulate(x.data(), y.data(), acc.data(), x.size());
}

double dot(std::span<const double> x, std::span<const double> y) {
  check_sizes(x.size(), y.size());
  return kernels().dot(x.data(), y.data(), x.size());
}

double squared_distance(std::span<const double> x, std::span<const double> y) {
  check_sizes(x.size(), y.size());
  return kernels().squared_distance(x.data(), y.data(), x.size());
}

double squared_norm(std::span<const double> x) { return dot(x, x); }

}  // namespace tiil::simd

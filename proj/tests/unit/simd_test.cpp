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

#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "test_util.hpp"

namespace tiil::simd {
namespace {

using tiil::testing::random_values;

std::vector<Isa> supported_variants() {
  std::vector<Isa> out;
  for (Isa isa : {Isa::kAvx2, Isa::kNeon}) {
    if (isa_supported(isa)) out.push_back(isa);
  }
  return out;
}

// Sizes straddle vector widths so remainder loops are exercised.
const std::vector<std::size_t> kSizes = {0, 1, 2, 3, 4, 5, 7, 8, 9, 15, 16, 17, 31, 33, 96, 768, 1001};

TEST(SimdTest, ScalarAlwaysSupported) {
  EXPECT_TRUE(isa_supported(Isa::kScalar));
  EXPECT_EQ(&kernels_for(Isa::kScalar), &detail::kScalarTable);
  EXPECT_TRUE(isa_supported(active_isa()));
}

TEST(SimdTest, UnsupportedVariantThrows) {
  for (Isa isa : {Isa::kAvx2, Isa::kNeon}) {
    if (!isa_supported(isa)) {
      EXPECT_THROW(kernels_for(isa), std::invalid_argument);
    }
  }
}

TEST(SimdTest, ElementwiseKernelsBitIdentical) {
  const KernelTable& ref = kernels_for(Isa::kScalar);
  for (Isa isa : supported_variants()) {
    const KernelTable& k = kernels_for(isa);
    for (std::size_t n : kSizes) {
      const auto x = random_values(n, 1 + n);
      const auto y = random_values(n, 1000 + n);
      std::vector<double> a(n), b(n);

      ref.axpby(0.37, x.data(), -1.9, y.data(), a.data(), n);
      k.axpby(0.37, x.data(), -1.9, y.data(), b.data(), n);
      EXPECT_EQ(a, b) << isa_name(isa) << " axpby n=" << n;

      ref.sub_scaled_div(x.data(), 0.8, y.data(), 0.6, a.data(), n);
      k.sub_scaled_div(x.data(), 0.8, y.data(), 0.6, b.data(), n);
      EXPECT_EQ(a, b) << isa_name(isa) << " sub_scaled_div n=" << n;

      a = y;
      b = y;
      ref.axpy(-2.5, x.data(), a.data(), n);
      k.axpy(-2.5, x.data(), b.data(), n);
      EXPECT_EQ(a, b) << isa_name(isa) << " axpy n=" << n;

      a.assign(n, 0.25);
      b.assign(n, 0.25);
      ref.abs_diff_accumulate(x.data(), y.data(), a.data(), n);
      k.abs_diff_accumulate(x.data(), y.data(), b.data(), n);
      EXPECT_EQ(a, b) << isa_name(isa) << " abs_diff_accumulate n=" << n;
    }
  }
}

TEST(SimdTest, ReductionsMatchWithinRounding) {
  const KernelTable& ref = kernels_for(Isa::kScalar);
  for (Isa isa : supported_variants()) {
    const KernelTable& k = kernels_for(isa);
    for (std::size_t n : kSizes) {
      const auto x = random_values(n, 7 + n);
      const auto y = random_values(n, 70 + n);
      double scale = 0.0;
      for (std::size_t i = 0; i < n; ++i) scale += std::abs(x[i] * y[i]);
      EXPECT_NEAR(ref.dot(x.data(), y.data(), n), k.dot(x.data(), y.data(), n),
                  1e-13 * (scale + 1.0))
          << isa_name(isa) << " n=" << n;
      const double sd = ref.squared_distance(x.data(), y.data(), n);
      EXPECT_NEAR(sd, k.squared_distance(x.data(), y.data(), n), 1e-13 * (sd + 1.0))
          << isa_name(isa) << " n=" << n;
    }
  }
}

TEST(SimdTest, ScalarKernelsMatchDefinitions) {
  const KernelTable& ref = kernels_for(Isa::kScalar);
  const std::vector<double> x = {1.0, -2.0, 3.5};
  const std::vector<double> y = {0.5, 4.0, -1.0};
  std::vector<double> out(3);
  ref.axpby(2.0, x.data(), 3.0, y.data(), out.data(), 3);
  EXPECT_EQ(out, (std::vector<double>{3.5, 8.0, 4.0}));
  ref.sub_scaled_div(x.data(), 2.0, y.data(), 0.5, out.data(), 3);
  EXPECT_EQ(out, (std::vector<double>{0.0, -20.0, 11.0}));
  std::vector<double> acc = {1.0, 1.0, 1.0};
  ref.abs_diff_accumulate(x.data(), y.data(), acc.data(), 3);
  EXPECT_EQ(acc, (std::vector<double>{1.5, 7.0, 5.5}));
  EXPECT_DOUBLE_EQ(ref.dot(x.data(), y.data(), 3), 0.5 - 8.0 - 3.5);
  EXPECT_DOUBLE_EQ(ref.squared_distance(x.data(), y.data(), 3), 0.25 + 36.0 + 20.25);
}

TEST(SimdTest, SpanFrontEndsRejectSizeMismatch) {
  std::vector<double> a(3), b(4), out(3);
  EXPECT_THROW(axpby(1.0, a, 1.0, b, out), std::invalid_argument);
  EXPECT_THROW(dot(a, b), std::invalid_argument);
  EXPECT_THROW(axpy(1.0, a, b), std::invalid_argument);
}

TEST(SimdTest, NegativeZeroAbsDiff) {
  // abs via sign-bit masking must agree with std::abs on signed zeros.
  const std::vector<double> x = {-0.0, 0.0, -1.0};
  const std::vector<double> y = {0.0, -0.0, -1.0};
  for (Isa isa : supported_variants()) {
    std::vector<double> acc(3, 0.0);
    kernels_for(isa).abs_diff_accumulate(x.data(), y.data(), acc.data(), 3);
    for (double v : acc) {
      EXPECT_EQ(v, 0.0);
      EXPECT_FALSE(std::signbit(v));
    }
  }
}

}  // namespace
}  // namespace tiil::simd

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

#include <gtest/gtest.h>

#include <Eigen/Dense>

#include <cmath>

#include "test_util.hpp"
#include "tiil/backend.hpp"
#include "tiil/error.hpp"
#include "tiil/rng.hpp"
#include "tiil/synthetic_backend.hpp"

namespace tiil {
namespace {

using tiil::testing::random_image;
using tiil::testing::random_matrix;
using tiil::testing::random_values;
using SB = SyntheticBackend;

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// Renders with plain loops over (k, y, dx, c), independent of strip_index.
std::vector<double> render_oracle(const SB& b, const TokenEmbeddingMatrix& e) {
  std::vector<double> img(16 * 16 * 3, 0.5);
  for (std::size_t k = 0; k < e.n_tokens(); ++k) {
    const auto a = b.projection(k);
    for (std::size_t y = 0; y < 16; ++y) {
      for (std::size_t dx = 0; dx < 2; ++dx) {
        for (std::size_t c = 0; c < 3; ++c) {
          const std::size_t p = (y * 2 + dx) * 3 + c;
          double z = 0.0;
          for (std::size_t d = 0; d < 16; ++d) z += a[p * 16 + d] * e.row(k)[d];
          img[(y * 16 + 2 * k + dx) * 3 + c] = sigmoid(z);
        }
      }
    }
  }
  return img;
}

TEST(NoiseScheduleTest, Validation) {
  EXPECT_THROW(NoiseSchedule({}), InvalidArgument);
  EXPECT_THROW(NoiseSchedule({0.5, 0.0}), InvalidArgument);
  EXPECT_THROW(NoiseSchedule({1.01}), InvalidArgument);
  EXPECT_NO_THROW(NoiseSchedule({1.0, 0.3}));
  const auto s = NoiseSchedule::linear(5, 0.9, 0.1);
  EXPECT_DOUBLE_EQ(s.alpha(0), 0.9);
  EXPECT_DOUBLE_EQ(s.alpha(4), 0.1);
  EXPECT_NEAR(s.alpha(2), 0.5, 1e-15);
  EXPECT_THROW(s.alpha(5), InvalidArgument);
}

TEST(ForwardNoiseTest, NoiselessLimit) {
  const NoiseSchedule s({1.0});
  const Tensor x0({8, 8, 3}, random_values(192, 1));
  const Tensor eps({8, 8, 3}, random_values(192, 2));
  const Tensor xt = forward_noise(x0, 0, eps, s);
  EXPECT_TRUE(std::ranges::equal(xt.values(), x0.values()));
}

TEST(ForwardNoiseTest, VanishingSignalWithZeroNoise) {
  const NoiseSchedule s({1e-12});
  const Tensor x0({8, 8, 1}, 0.9);
  const Tensor xt = forward_noise(x0, 0, Tensor({8, 8, 1}, 0.0), s);
  for (double v : xt.values()) EXPECT_NEAR(v, 0.0, 1e-6);
}

TEST(ForwardNoiseTest, HandArithmetic) {
  // sqrt(0.25)*0.5 + sqrt(0.75)*1.0 = 0.25 + 0.8660254...
  const NoiseSchedule s({0.25});
  const Tensor xt = forward_noise(Tensor({8, 8, 3}, 0.5), 0, Tensor({8, 8, 3}, 1.0), s);
  for (double v : xt.values()) EXPECT_NEAR(v, 0.25 + 0.8660254037844386, 1e-15);
}

TEST(ForwardNoiseTest, Errors) {
  const NoiseSchedule s({0.5});
  EXPECT_THROW(forward_noise(Tensor({8, 8, 3}), 1, Tensor({8, 8, 3}), s), InvalidArgument);
  EXPECT_THROW(forward_noise(Tensor({8, 8, 3}), 0, Tensor({8, 8, 1}), s), InvalidArgument);
}

class SyntheticBackendTest : public ::testing::Test {
 protected:
  SB backend_;
};

TEST_F(SyntheticBackendTest, ProjectionRecomputedFromSeed) {
  // Same construction as documented: per strip a channel-centred base colour
  // tiled over pixels plus a column-centred texture.
  const auto& cfg = backend_.config();
  Rng rng(mix_seed(cfg.seed, "projection"));
  const double sd = cfg.matrix_scale / 4.0;
  for (std::size_t k = 0; k < 8; ++k) {
    Eigen::MatrixXd base(3, 16), tex(96, 16);
    for (int r = 0; r < 3; ++r)
      for (int d = 0; d < 16; ++d) base(r, d) = rng.normal(0, sd);
    for (int r = 0; r < 96; ++r)
      for (int d = 0; d < 16; ++d) tex(r, d) = rng.normal(0, sd);
    for (int d = 0; d < 16; ++d) {
      base.col(d).array() -= base.col(d).mean();
      tex.col(d).array() -= tex.col(d).mean();
    }
    const auto a = backend_.projection(k);
    for (int p = 0; p < 96; ++p) {
      for (int d = 0; d < 16; ++d) {
        EXPECT_NEAR(a[p * 16 + d], base(p % 3, d) + cfg.texture_weight * tex(p, d), 1e-14);
      }
    }
  }
}

TEST_F(SyntheticBackendTest, EncodeTextRecomputesTableFromSeed) {
  const EncodedText enc = backend_.encode_text("a b c");
  ASSERT_EQ(enc.embedding.n_tokens(), 3u);
  EXPECT_EQ(enc.embedding.token_strings(), (std::vector<std::string>{"a", "b", "c"}));
  EXPECT_EQ(enc.embedding.origin(), EmbeddingOrigin::kEncoded);
  EXPECT_TRUE(enc.warnings.empty());
  const char* tokens[] = {"a", "b", "c"};
  for (std::size_t k = 0; k < 3; ++k) {
    Rng rng(mix_seed(mix_seed(backend_.config().seed, "token"), tokens[k]));
    for (std::size_t d = 0; d < 16; ++d) {
      EXPECT_EQ(enc.embedding.row(k)[d], 0.7 * rng.normal());
    }
  }
}

TEST_F(SyntheticBackendTest, EncodeTextDeterministicAndCaseInsensitive) {
  EXPECT_EQ(backend_.encode_text("Red fox").embedding.values()[3],
            backend_.encode_text("red FOX").embedding.values()[3]);
  EXPECT_EQ(backend_.encode_text("red fox").embedding, backend_.encode_text("red fox").embedding);
}

TEST_F(SyntheticBackendTest, EncodeTextErrorsAndTruncation) {
  EXPECT_THROW(backend_.encode_text(""), InvalidArgument);
  EXPECT_THROW(backend_.encode_text("  ,, "), InvalidArgument);
  const EncodedText enc = backend_.encode_text("one two three four five six seven eight nine ten");
  EXPECT_EQ(enc.embedding.n_tokens(), 8u);
  ASSERT_EQ(enc.warnings.size(), 1u);
  EXPECT_NE(enc.warnings[0].find("truncated"), std::string::npos);
}

TEST_F(SyntheticBackendTest, EncodeImageUnitNorm) {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto v = backend_.encode_image(random_image(SB::image_shape(), s));
    double n = 0;
    for (double x : v) n += x * x;
    EXPECT_NEAR(std::sqrt(n), 1.0, 1e-6);
  }
}

TEST_F(SyntheticBackendTest, EncodeImageMatchesDirectMatrixMultiply) {
  const ImageTensor img = random_image(SB::image_shape(), 4);
  BinaryMask mask = SB::strip_mask(3);
  mask.set(0, 0, true);
  const auto w = backend_.encoder_matrix();
  std::vector<double> v(16, 0.0);
  for (std::size_t d = 0; d < 16; ++d) {
    for (std::size_t y = 0; y < 16; ++y)
      for (std::size_t x = 0; x < 16; ++x)
        for (std::size_t c = 0; c < 3; ++c) {
          const double px = mask.at(y, x) ? img.at(y, x, c) : 0.0;
          v[d] += w[d * 768 + (y * 16 + x) * 3 + c] * px;
        }
  }
  double n = 0;
  for (double x : v) n += x * x;
  const auto got = backend_.encode_image(img, &mask);
  for (std::size_t d = 0; d < 16; ++d) EXPECT_NEAR(got[d], v[d] / std::sqrt(n), 1e-12);
}

TEST_F(SyntheticBackendTest, EncodeImageMaskConventions) {
  const ImageTensor img = random_image(SB::image_shape(), 5);
  const BinaryMask ones(16, 16, true);
  EXPECT_EQ(backend_.encode_image(img, &ones), backend_.encode_image(img));
  const BinaryMask zeros(16, 16, false);
  const auto v = backend_.encode_image(img, &zeros);
  EXPECT_EQ(v[0], 1.0);
  for (std::size_t d = 1; d < v.size(); ++d) EXPECT_EQ(v[d], 0.0);
  const BinaryMask wrong(8, 8, true);
  EXPECT_THROW(backend_.encode_image(img, &wrong), InvalidArgument);
}

TEST(SyntheticEncoderTest, UndistortedEncoderInvertsEachStrip) {
  SyntheticBackendConfig cfg;
  cfg.encoder_distortion = 0.0;
  const SB b(cfg);
  const auto w = b.encoder_matrix();
  for (std::size_t k = 0; k < 8; ++k) {
    const auto a = b.projection(k);
    for (std::size_t d = 0; d < 16; ++d) {
      for (std::size_t e = 0; e < 16; ++e) {
        double s = 0;
        for (std::size_t p = 0; p < 96; ++p) s += w[d * 768 + SB::strip_index(k, p)] * a[p * 16 + e];
        EXPECT_NEAR(s, d == e ? cfg.encoder_gain : 0.0, 1e-9);
      }
    }
  }
}

TEST_F(SyntheticBackendTest, GenerateMatchesRenderOracle) {
  for (std::size_t n : {1u, 5u, 8u}) {
    const auto e = random_matrix(n, 16, 10 + n);
    const ImageTensor g = backend_.generate(Tensor(SB::image_shape()), e);
    const auto want = render_oracle(backend_, e);
    for (std::size_t i = 0; i < want.size(); ++i) EXPECT_NEAR(g.values()[i], want[i], 1e-12);
  }
}

TEST_F(SyntheticBackendTest, GenerateIgnoresNoiseAndIsDeterministic) {
  const auto e = random_matrix(8, 16, 3);
  const Tensor a(SB::image_shape(), random_values(768, 1));
  const Tensor b(SB::image_shape(), random_values(768, 2));
  EXPECT_EQ(backend_.generate(a, e), backend_.generate(b, e));
  EXPECT_EQ(backend_.generate(a, e), backend_.generate(a, e));
}

TEST_F(SyntheticBackendTest, GenerateErrors) {
  EXPECT_THROW(backend_.generate(Tensor(SB::image_shape()), random_matrix(2, 15, 1)),
               InvalidArgument);
  EXPECT_THROW(backend_.generate(Tensor(SB::image_shape()), random_matrix(9, 16, 1)),
               InvalidArgument);
  EXPECT_THROW(backend_.generate(Tensor({8, 8, 3}), random_matrix(2, 16, 1)), InvalidArgument);
}

TEST_F(SyntheticBackendTest, ChangingRowKOnlyChangesStripK) {
  for (std::uint64_t trial = 0; trial < 20; ++trial) {
    const auto e = random_matrix(8, 16, 100 + trial);
    const std::size_t k = trial % 8;
    std::vector<double> v(e.values().begin(), e.values().end());
    const auto delta = random_values(16, 200 + trial);
    for (std::size_t d = 0; d < 16; ++d) v[k * 16 + d] += delta[d];
    const auto f = e.with_values(v, EmbeddingOrigin::kSynthetic);
    const ImageTensor a = backend_.render(e);
    const ImageTensor b = backend_.render(f);
    for (std::size_t y = 0; y < 16; ++y) {
      for (std::size_t x = 0; x < 16; ++x) {
        for (std::size_t c = 0; c < 3; ++c) {
          if (x / 2 != k) {
            EXPECT_EQ(a.at(y, x, c), b.at(y, x, c));
          }
        }
      }
    }
    EXPECT_NE(a, b);
  }
}

TEST_F(SyntheticBackendTest, EstimateInvertsForwardNoise) {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto e = random_matrix(8, 16, s);
    const Tensor eps(SB::image_shape(), random_values(768, 50 + s));
    const std::size_t t = (s * 7) % backend_.schedule().size();
    const Tensor xt = forward_noise(backend_.render(e), t, eps, backend_.schedule());
    const Tensor est = backend_.estimate_noise(xt, t, e);
    for (std::size_t i = 0; i < 768; ++i) EXPECT_NEAR(est.values()[i], eps.values()[i], 1e-9);
  }
}

TEST_F(SyntheticBackendTest, EstimateDifferenceClosedForm) {
  const auto ea = random_matrix(8, 16, 1);
  std::vector<double> v(ea.values().begin(), ea.values().end());
  for (std::size_t d = 0; d < 16; ++d) v[5 * 16 + d] = -v[5 * 16 + d];
  const auto eb = ea.with_values(v, EmbeddingOrigin::kSynthetic);
  const std::size_t t = 20;
  const double a = backend_.schedule().alpha(t);
  const Tensor xt(SB::image_shape(), random_values(768, 9));
  const Tensor da = backend_.estimate_noise(xt, t, ea);
  const Tensor db = backend_.estimate_noise(xt, t, eb);
  const auto ra = render_oracle(backend_, ea);
  const auto rb = render_oracle(backend_, eb);
  for (std::size_t i = 0; i < 768; ++i) {
    const double want = std::sqrt(a) / std::sqrt(1 - a) * std::abs(ra[i] - rb[i]);
    EXPECT_NEAR(std::abs(da.values()[i] - db.values()[i]), want, 1e-9);
    const std::size_t x = (i / 3) % 16;
    if (x / 2 != 5) {
      EXPECT_EQ(da.values()[i], db.values()[i]);
    }
  }
}

TEST(SyntheticConfigTest, ScheduleMustExcludeAlphaOne) {
  SyntheticBackendConfig cfg;
  cfg.alpha_first = 1.0;
  EXPECT_THROW(SB{cfg}, BackendError);
}

TEST_F(SyntheticBackendTest, InpaintCompositing) {
  const ImageTensor img = random_image(SB::image_shape(), 8);
  const auto e = random_matrix(8, 16, 8);
  EXPECT_EQ(backend_.inpaint(img, BinaryMask(16, 16), e), img);
  EXPECT_EQ(backend_.inpaint(img, BinaryMask(16, 16, true), e), backend_.render(e));
  const ImageTensor out = backend_.inpaint(img, SB::strip_mask(2), e);
  const ImageTensor r = backend_.render(e);
  for (std::size_t y = 0; y < 16; ++y)
    for (std::size_t x = 0; x < 16; ++x)
      for (std::size_t c = 0; c < 3; ++c)
        EXPECT_EQ(out.at(y, x, c), x / 2 == 2 ? r.at(y, x, c) : img.at(y, x, c));
  EXPECT_THROW(backend_.inpaint(img, BinaryMask(8, 8), e), InvalidArgument);
}

TEST(BackendFactoryTest, SyntheticSelection) {
  const BackendBundle b = make_backend("synthetic");
  EXPECT_NO_THROW(b.validate());
  EXPECT_TRUE(b.capabilities.differentiable_generator);
  EXPECT_TRUE(b.capabilities.concurrent_inference);
  EXPECT_DOUBLE_EQ(b.guidance_scale, 7.5);
  EXPECT_NE(as_synthetic(b), nullptr);
  EXPECT_EQ(make_backend("synthetic:99").id, "synthetic:99");
  EXPECT_THROW(make_backend("synthetic:x9"), BackendError);
}

TEST(BackendFactoryTest, DiffusionWithoutAdapterFails) {
  EXPECT_THROW(make_backend("diffusion:some-model"), BackendError);
  EXPECT_THROW(make_backend("nonsense"), BackendError);
  EXPECT_THROW(make_backend(""), BackendError);
}

TEST(BackendFactoryTest, RegisteredAdapterIsUsed) {
  register_backend_factory("mock", [](const std::string& arg, const std::string&) {
    BackendBundle b = make_synthetic_backend();
    b.id = "mock:" + arg;
    return b;
  });
  EXPECT_EQ(make_backend("mock:m1").id, "mock:m1");
  EXPECT_THROW(make_backend("mock"), BackendError);
  register_backend_factory("broken", [](const std::string&, const std::string&) {
    BackendBundle b = make_synthetic_backend();
    b.inpainter.reset();
    return b;
  });
  EXPECT_THROW(make_backend("broken:x"), BackendError);
}

TEST(BackendBundleTest, ValidateGuidance) {
  BackendBundle b = make_synthetic_backend();
  b.guidance_scale = 0.0;
  EXPECT_THROW(b.validate(), BackendError);
}

}  // namespace
}  // namespace tiil

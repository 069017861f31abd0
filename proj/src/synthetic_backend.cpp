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

#include "tiil/synthetic_backend.hpp"

#include <Eigen/Dense>

#include <cmath>

#include "tiil/error.hpp"
#include "tiil/rng.hpp"
#include "tiil/simd.hpp"
#include "tiil/text.hpp"

namespace tiil {
namespace {

constexpr std::size_t kNumel =
    SyntheticBackend::kHeight * SyntheticBackend::kWidth * SyntheticBackend::kChannels;

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

}  // namespace

SyntheticBackend::SyntheticBackend(SyntheticBackendConfig cfg)
    : cfg_(cfg),
      schedule_(NoiseSchedule::linear(cfg.schedule_steps, cfg.alpha_first, cfg.alpha_last)) {
  if (!(cfg_.matrix_scale > 0.0) || !(cfg_.embedding_stddev > 0.0) ||
      !(cfg_.encoder_gain > 0.0) || cfg_.texture_weight < 0.0 || cfg_.encoder_distortion < 0.0) {
    throw BackendError("invalid synthetic backend configuration");
  }
  for (const auto& [token, row] : cfg_.token_table) {
    if (row.size() != kDim) {
      throw BackendError("token table row for '" + token + "' must have 16 entries");
    }
  }
  for (double a : schedule_.alphas()) {
    if (a >= 1.0) throw BackendError("synthetic schedule must exclude alpha = 1");
  }

  const double sd = cfg_.matrix_scale / std::sqrt(static_cast<double>(kDim));
  Rng rng(mix_seed(cfg_.seed, "projection"));
  projections_.assign(kTokens * kStripValues * kDim, 0.0);
  for (std::size_t k = 0; k < kTokens; ++k) {
    Eigen::MatrixXd base(kChannels, kDim);
    Eigen::MatrixXd texture(kStripValues, kDim);
    for (Eigen::Index i = 0; i < base.size(); ++i) base(i / kDim, i % kDim) = rng.normal(0, sd);
    for (Eigen::Index i = 0; i < texture.size(); ++i) {
      texture(i / kDim, i % kDim) = rng.normal(0, sd);
    }
    // Zero-mean columns keep a uniform grey shift out of the token subspace.
    base.rowwise() -= base.colwise().mean();
    texture.rowwise() -= texture.colwise().mean();
    double* a = projections_.data() + k * kStripValues * kDim;
    for (std::size_t p = 0; p < kStripValues; ++p) {
      for (std::size_t d = 0; d < kDim; ++d) {
        a[p * kDim + d] = base(p % kChannels, d) + cfg_.texture_weight * texture(p, d);
      }
    }
  }

  encoder_.assign(kDim * kNumel, 0.0);
  for (std::size_t k = 0; k < kTokens; ++k) {
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> a(
        projections_.data() + k * kStripValues * kDim, kStripValues, kDim);
    const Eigen::MatrixXd pinv = a.completeOrthogonalDecomposition().pseudoInverse();
    for (std::size_t d = 0; d < kDim; ++d) {
      for (std::size_t p = 0; p < kStripValues; ++p) {
        encoder_[d * kNumel + strip_index(k, p)] = cfg_.encoder_gain * pinv(d, p);
      }
    }
  }
  double mean_abs = 0.0;
  for (double w : encoder_) mean_abs += std::abs(w);
  mean_abs /= static_cast<double>(encoder_.size());
  Rng enc_rng(mix_seed(cfg_.seed, "encoder"));
  for (double& w : encoder_) w += cfg_.encoder_distortion * mean_abs * enc_rng.normal();
}

std::vector<double> SyntheticBackend::token_embedding(std::string_view token) const {
  if (auto it = cfg_.token_table.find(token); it != cfg_.token_table.end()) return it->second;
  Rng rng(mix_seed(mix_seed(cfg_.seed, "token"), token));
  return rng.normal_vector(kDim, cfg_.embedding_stddev);
}

std::span<const double> SyntheticBackend::projection(std::size_t k) const {
  if (k >= kTokens) throw InvalidArgument("strip index out of range");
  return std::span<const double>(projections_).subspan(k * kStripValues * kDim,
                                                        kStripValues * kDim);
}

std::size_t SyntheticBackend::strip_index(std::size_t k, std::size_t p) {
  const std::size_t c = p % kChannels;
  const std::size_t pix = p / kChannels;
  const std::size_t y = pix / kStripWidth;
  const std::size_t x = k * kStripWidth + pix % kStripWidth;
  return (y * kWidth + x) * kChannels + c;
}

BinaryMask SyntheticBackend::strip_mask(std::size_t k) {
  if (k >= kTokens) throw InvalidArgument("strip index out of range");
  BinaryMask m(kHeight, kWidth);
  for (std::size_t y = 0; y < kHeight; ++y) {
    for (std::size_t dx = 0; dx < kStripWidth; ++dx) m.set(y, k * kStripWidth + dx, true);
  }
  return m;
}

void SyntheticBackend::check_embedding(const TokenEmbeddingMatrix& e) const {
  if (e.dim() != kDim || e.n_tokens() > kTokens) {
    throw InvalidArgument("synthetic backend expects up to " + std::to_string(kTokens) +
                          " rows of dim " + std::to_string(kDim) + ", got " +
                          std::to_string(e.n_tokens()) + "x" + std::to_string(e.dim()));
  }
}

void SyntheticBackend::check_image(const TensorShape& shape, const char* what) const {
  if (!(shape == image_shape())) {
    throw InvalidArgument(std::string(what) + " must be " + to_string(image_shape()) + ", got " +
                          to_string(shape));
  }
}

void SyntheticBackend::strip_logits(const TokenEmbeddingMatrix& e, std::size_t k,
                                    std::span<double> z) const {
  const auto a = projection(k);
  const auto row = e.row(k);
  for (std::size_t p = 0; p < kStripValues; ++p) {
    z[p] = simd::dot(a.subspan(p * kDim, kDim), row);
  }
}

ImageTensor SyntheticBackend::render(const TokenEmbeddingMatrix& e) const {
  check_embedding(e);
  std::vector<double> data(kNumel, 0.5);
  std::vector<double> z(kStripValues);
  for (std::size_t k = 0; k < e.n_tokens(); ++k) {
    strip_logits(e, k, z);
    for (std::size_t p = 0; p < kStripValues; ++p) data[strip_index(k, p)] = sigmoid(z[p]);
  }
  return ImageTensor(image_shape(), std::move(data));
}

EncodedText SyntheticBackend::encode_text(std::string_view text) const {
  const auto words = tokenize_words(text);
  if (words.empty()) throw InvalidArgument("empty text");
  EncodedText out{TokenEmbeddingMatrix(1, kDim, std::vector<double>(kDim, 0.0)), {}};
  std::size_t n = words.size();
  if (n > kTokens) {
    out.warnings.push_back("text has " + std::to_string(n) + " tokens; truncated to " +
                           std::to_string(kTokens));
    n = kTokens;
  }
  std::vector<double> rows;
  rows.reserve(n * kDim);
  std::vector<std::string> strings;
  for (std::size_t i = 0; i < n; ++i) {
    const auto v = token_embedding(words[i].lower);
    rows.insert(rows.end(), v.begin(), v.end());
    strings.push_back(words[i].lower);
  }
  out.embedding = TokenEmbeddingMatrix(n, kDim, std::move(rows), std::move(strings),
                                       EmbeddingOrigin::kEncoded);
  return out;
}

std::vector<double> SyntheticBackend::encode_image(const ImageTensor& image,
                                                   const BinaryMask* mask) const {
  check_image(image.shape(), "image");
  std::vector<double> pixels(image.values().begin(), image.values().end());
  if (mask != nullptr) {
    if (!mask->same_size(kHeight, kWidth)) throw InvalidArgument("mask size != image size");
    for (std::size_t i = 0; i < mask->size(); ++i) {
      if (!mask->at_index(i)) {
        for (std::size_t c = 0; c < kChannels; ++c) pixels[i * kChannels + c] = 0.0;
      }
    }
  }
  std::vector<double> v(kDim);
  for (std::size_t d = 0; d < kDim; ++d) {
    v[d] = simd::dot(std::span<const double>(encoder_).subspan(d * kNumel, kNumel), pixels);
  }
  const double norm = std::sqrt(simd::squared_norm(v));
  if (norm == 0.0) {
    // Zero input has no direction; return a fixed unit vector.
    std::vector<double> e1(kDim, 0.0);
    e1[0] = 1.0;
    return e1;
  }
  for (double& x : v) x /= norm;
  return v;
}

ImageTensor SyntheticBackend::generate(const Tensor& xT, const TokenEmbeddingMatrix& e) const {
  check_image(xT.shape(), "xT");
  return render(e);
}

std::vector<double> SyntheticBackend::generate_vjp(const Tensor& xT,
                                                   const TokenEmbeddingMatrix& e,
                                                   std::span<const double> grad_image) const {
  check_image(xT.shape(), "xT");
  check_embedding(e);
  if (grad_image.size() != kNumel) throw InvalidArgument("image gradient has wrong size");
  std::vector<double> grad(e.n_tokens() * kDim, 0.0);
  std::vector<double> z(kStripValues);
  for (std::size_t k = 0; k < e.n_tokens(); ++k) {
    strip_logits(e, k, z);
    const auto a = projection(k);
    std::span<double> g = std::span<double>(grad).subspan(k * kDim, kDim);
    for (std::size_t p = 0; p < kStripValues; ++p) {
      const double s = sigmoid(z[p]);
      simd::axpy(grad_image[strip_index(k, p)] * s * (1.0 - s), a.subspan(p * kDim, kDim), g);
    }
  }
  return grad;
}

Tensor SyntheticBackend::estimate_noise(const Tensor& xt, std::size_t t,
                                        const TokenEmbeddingMatrix& e) const {
  check_image(xt.shape(), "xt");
  const double a = schedule_.alpha(t);
  if (a >= 1.0) throw InvalidArgument("cannot estimate noise at alpha_t = 1");
  const ImageTensor r = render(e);
  Tensor out(xt.shape());
  simd::sub_scaled_div(xt.values(), std::sqrt(a), r.values(), std::sqrt(1.0 - a), out.values());
  return out;
}

ImageTensor SyntheticBackend::inpaint(const ImageTensor& image, const BinaryMask& mask,
                                      const TokenEmbeddingMatrix& e) const {
  check_image(image.shape(), "image");
  if (!mask.same_size(kHeight, kWidth)) throw InvalidArgument("mask size != image size");
  if (mask.empty()) return image;
  const ImageTensor r = render(e);
  std::vector<double> data(image.values().begin(), image.values().end());
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (!mask.at_index(i)) continue;
    for (std::size_t c = 0; c < kChannels; ++c) {
      data[i * kChannels + c] = r.values()[i * kChannels + c];
    }
  }
  return ImageTensor(image.shape(), std::move(data));
}

BackendBundle make_synthetic_backend(const SyntheticBackendConfig& cfg) {
  auto backend = std::make_shared<const SyntheticBackend>(cfg);
  BackendBundle b;
  b.id = "synthetic:" + std::to_string(cfg.seed);
  b.text_encoder = backend;
  b.image_encoder = backend;
  b.generator = backend;
  b.noise_estimator = backend;
  b.inpainter = backend;
  b.schedule = backend->schedule();
  b.guidance_scale = 7.5;
  b.capabilities = {true, true};
  b.image_shape = SyntheticBackend::image_shape();
  b.recommended_learning_rate = cfg.learning_rate;
  b.mask_noise_floor = cfg.mask_noise_floor;
  return b;
}

std::shared_ptr<const SyntheticBackend> as_synthetic(const BackendBundle& bundle) {
  return std::dynamic_pointer_cast<const SyntheticBackend>(bundle.generator);
}

}  // namespace tiil

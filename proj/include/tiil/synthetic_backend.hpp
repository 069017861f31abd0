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

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tiil/backend.hpp"

namespace tiil {

// Knobs of the synthetic world. Geometry is fixed: 16x16x3 images split into
// 8 vertical strips of width 2, one per token, and 16-dim token rows.
struct SyntheticBackendConfig {
  std::uint64_t seed = 1234;
  // Entries of the projection matrices are N(0, (matrix_scale/4)^2).
  double matrix_scale = 1.5;
  // Weight of the per-pixel texture added to each strip's base colour.
  double texture_weight = 0.5;
  // Token rows are N(0, embedding_stddev^2).
  double embedding_stddev = 0.7;
  double encoder_gain = 4.0;
  // Relative size of the seeded perturbation of the image encoder.
  double encoder_distortion = 0.3;
  std::size_t schedule_steps = 50;
  double alpha_first = 0.98;
  double alpha_last = 0.02;
  double learning_rate = 0.2;
  double mask_noise_floor = 0.12;
  // Fixed rows for specific lower-case tokens; all others are drawn from the
  // seeded table. Each row must have 16 entries.
  std::map<std::string, std::vector<double>, std::less<>> token_table;
};

// Deterministic toy diffusion world. Token k paints strip P_k (columns 2k and
// 2k+1) with sigmoid(A_k * E[k]), where A_k maps a token row to the strip's
// 96 pixel-channel values. Rows beyond the caption length render grey 0.5.
class SyntheticBackend final : public TextEncoder,
                               public ImageEncoder,
                               public Generator,
                               public NoiseEstimator,
                               public Inpainter {
 public:
  static constexpr std::size_t kHeight = 16;
  static constexpr std::size_t kWidth = 16;
  static constexpr std::size_t kChannels = 3;
  static constexpr std::size_t kTokens = 8;
  static constexpr std::size_t kDim = 16;
  static constexpr std::size_t kStripWidth = 2;
  // Pixel-channel values per strip.
  static constexpr std::size_t kStripValues = kHeight * kStripWidth * kChannels;

  explicit SyntheticBackend(SyntheticBackendConfig cfg = {});

  const SyntheticBackendConfig& config() const { return cfg_; }
  static TensorShape image_shape() { return {kHeight, kWidth, kChannels}; }

  // Token row for a (lower-case) token string.
  std::vector<double> token_embedding(std::string_view token) const;
  // A_k, row-major kStripValues x kDim. Row p is strip value p (see strip_index).
  std::span<const double> projection(std::size_t k) const;
  // Image encoder, row-major kDim x (H*W*C) over HWC-flattened pixels.
  std::span<const double> encoder_matrix() const { return encoder_; }
  // Flat HWC index of strip value p of strip k; p = (y*2 + dx)*3 + c.
  static std::size_t strip_index(std::size_t k, std::size_t p);
  static BinaryMask strip_mask(std::size_t k);

  ImageTensor render(const TokenEmbeddingMatrix& e) const;

  EncodedText encode_text(std::string_view text) const override;
  std::size_t max_tokens() const override { return kTokens; }
  std::size_t embedding_dim() const override { return kDim; }

  std::vector<double> encode_image(const ImageTensor& image,
                                   const BinaryMask* mask = nullptr) const override;

  ImageTensor generate(const Tensor& xT, const TokenEmbeddingMatrix& e) const override;
  std::vector<double> generate_vjp(const Tensor& xT, const TokenEmbeddingMatrix& e,
                                   std::span<const double> grad_image) const override;

  Tensor estimate_noise(const Tensor& xt, std::size_t t,
                        const TokenEmbeddingMatrix& e) const override;

  ImageTensor inpaint(const ImageTensor& image, const BinaryMask& mask,
                      const TokenEmbeddingMatrix& e) const override;

  const NoiseSchedule& schedule() const { return schedule_; }

 private:
  void check_embedding(const TokenEmbeddingMatrix& e) const;
  void check_image(const TensorShape& shape, const char* what) const;
  // Pre-activation z = A_k E[k] for every strip value of strip k.
  void strip_logits(const TokenEmbeddingMatrix& e, std::size_t k, std::span<double> z) const;

  SyntheticBackendConfig cfg_;
  NoiseSchedule schedule_;
  std::vector<double> projections_;  // kTokens blocks of kStripValues x kDim
  std::vector<double> encoder_;      // kDim x numel
};

BackendBundle make_synthetic_backend(const SyntheticBackendConfig& cfg = {});

// The SyntheticBackend behind a bundle, or nullptr for other backends.
std::shared_ptr<const SyntheticBackend> as_synthetic(const BackendBundle& bundle);

}  // namespace tiil

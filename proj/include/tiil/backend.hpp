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
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tiil/tensor.hpp"

namespace tiil {

// Cumulative signal levels alpha_t in (0,1], indexed by timestep.
class NoiseSchedule {
 public:
  explicit NoiseSchedule(std::vector<double> alphas);
  // `n` values spaced linearly from `first` to `last`.
  static NoiseSchedule linear(std::size_t n, double first, double last);

  std::size_t size() const { return alphas_.size(); }
  double alpha(std::size_t t) const;
  const std::vector<double>& alphas() const { return alphas_; }

 private:
  std::vector<double> alphas_;
};

// sqrt(alpha_t)*x0 + sqrt(1-alpha_t)*eps.
Tensor forward_noise(const Tensor& x0, std::size_t t, const Tensor& eps,
                     const NoiseSchedule& schedule);
Tensor forward_noise(const ImageTensor& x0, std::size_t t, const Tensor& eps,
                     const NoiseSchedule& schedule);

struct EncodedText {
  TokenEmbeddingMatrix embedding;
  // Non-fatal notes such as token-limit truncation.
  std::vector<std::string> warnings;
};

class TextEncoder {
 public:
  virtual ~TextEncoder() = default;
  virtual EncodedText encode_text(std::string_view text) const = 0;
  virtual std::size_t max_tokens() const = 0;
  virtual std::size_t embedding_dim() const = 0;
};

class ImageEncoder {
 public:
  virtual ~ImageEncoder() = default;
  // Unit-norm embedding. With a mask, pixels outside it are zeroed first.
  virtual std::vector<double> encode_image(const ImageTensor& image,
                                           const BinaryMask* mask = nullptr) const = 0;
};

class Generator {
 public:
  virtual ~Generator() = default;
  virtual ImageTensor generate(const Tensor& xT, const TokenEmbeddingMatrix& e) const = 0;
  // Vector-Jacobian product: gradient of a scalar loss w.r.t. E given the
  // gradient w.r.t. the generated image. Only for differentiable generators.
  virtual std::vector<double> generate_vjp(const Tensor& xT, const TokenEmbeddingMatrix& e,
                                           std::span<const double> grad_image) const;
};

class NoiseEstimator {
 public:
  virtual ~NoiseEstimator() = default;
  virtual Tensor estimate_noise(const Tensor& xt, std::size_t t,
                                const TokenEmbeddingMatrix& e) const = 0;
};

class Inpainter {
 public:
  virtual ~Inpainter() = default;
  // Re-synthesizes pixels inside `mask` conditioned on `e`; the rest is kept.
  virtual ImageTensor inpaint(const ImageTensor& image, const BinaryMask& mask,
                              const TokenEmbeddingMatrix& e) const = 0;
};

struct BackendCapabilities {
  bool differentiable_generator = false;
  bool concurrent_inference = false;
};

struct BackendBundle {
  std::string id;
  std::shared_ptr<const TextEncoder> text_encoder;
  std::shared_ptr<const ImageEncoder> image_encoder;
  std::shared_ptr<const Generator> generator;
  std::shared_ptr<const NoiseEstimator> noise_estimator;
  std::shared_ptr<const Inpainter> inpainter;
  NoiseSchedule schedule{std::vector<double>{0.5}};
  double guidance_scale = 7.5;
  BackendCapabilities capabilities;
  // Shape the generator produces; inputs to alignment must match it.
  TensorShape image_shape;
  // Alignment step size suited to this backend's loss scale, if it differs
  // from the default.
  std::optional<double> recommended_learning_rate;
  // Smallest per-pixel image-space difference the mask stage treats as signal.
  double mask_noise_floor = 0.0;

  // Throws BackendError when a role is missing or a field is invalid.
  void validate() const;
};

// "synthetic", "synthetic:<seed>" or "diffusion:<model-id>".
struct BackendSelection {
  std::string kind;
  std::string argument;
};
BackendSelection parse_backend_selection(std::string_view selection);

using BackendFactory = std::function<BackendBundle(const std::string& argument,
                                                   const std::string& model_dir)>;

// Adapters for learned models register under a kind ("diffusion", ...).
void register_backend_factory(const std::string& kind, BackendFactory factory);

// Builds a bundle from a selection string. The model cache directory comes
// from TIIL_MODEL_DIR. Throws BackendError.
BackendBundle make_backend(std::string_view selection);

}  // namespace tiil

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
#include <span>
#include <string>
#include <vector>

namespace tiil {

struct TensorShape {
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t channels = 0;

  std::size_t numel() const { return height * width * channels; }
  std::size_t pixels() const { return height * width; }
  bool operator==(const TensorShape&) const = default;
};

std::string to_string(const TensorShape& shape);

// Dense HWC tensor of reals with no range constraint (noise, noised samples,
// noise estimates).
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(TensorShape shape, double fill = 0.0);
  Tensor(TensorShape shape, std::vector<double> data);

  const TensorShape& shape() const { return shape_; }
  std::size_t numel() const { return data_.size(); }
  std::span<const double> values() const { return data_; }
  std::span<double> values() { return data_; }

  double at(std::size_t y, std::size_t x, std::size_t c) const {
    return data_[(y * shape_.width + x) * shape_.channels + c];
  }
  double& at(std::size_t y, std::size_t x, std::size_t c) {
    return data_[(y * shape_.width + x) * shape_.channels + c];
  }

 private:
  TensorShape shape_;
  std::vector<double> data_;
};

// Image with every value in [0,1] and at least 8x8 pixels. Immutable once
// built; construction validates.
class ImageTensor {
 public:
  static constexpr std::size_t kMinSide = 8;

  ImageTensor(TensorShape shape, std::vector<double> data);
  static ImageTensor filled(TensorShape shape, double value);
  static ImageTensor from_tensor(Tensor tensor);

  const TensorShape& shape() const { return tensor_.shape(); }
  std::size_t height() const { return tensor_.shape().height; }
  std::size_t width() const { return tensor_.shape().width; }
  std::size_t channels() const { return tensor_.shape().channels; }
  std::span<const double> values() const { return tensor_.values(); }
  double at(std::size_t y, std::size_t x, std::size_t c) const { return tensor_.at(y, x, c); }
  const Tensor& tensor() const { return tensor_; }

  bool operator==(const ImageTensor& other) const;

 private:
  explicit ImageTensor(Tensor tensor);
  Tensor tensor_;
};

// Per-pixel boolean mask (houses M' and M).
class BinaryMask {
 public:
  BinaryMask() = default;
  BinaryMask(std::size_t height, std::size_t width, bool value = false);
  BinaryMask(std::size_t height, std::size_t width, std::vector<std::uint8_t> bits);

  std::size_t height() const { return height_; }
  std::size_t width() const { return width_; }
  std::size_t size() const { return bits_.size(); }
  bool at(std::size_t y, std::size_t x) const { return bits_[y * width_ + x] != 0; }
  void set(std::size_t y, std::size_t x, bool v) { bits_[y * width_ + x] = v ? 1 : 0; }
  bool at_index(std::size_t i) const { return bits_[i] != 0; }
  std::span<const std::uint8_t> bits() const { return bits_; }

  std::size_t count() const;
  bool empty() const { return count() == 0; }
  bool same_size(std::size_t height, std::size_t width) const {
    return height_ == height && width_ == width;
  }
  bool operator==(const BinaryMask&) const = default;

 private:
  std::size_t height_ = 0;
  std::size_t width_ = 0;
  std::vector<std::uint8_t> bits_;
};

// Spatial heat map of noise-estimate differences (houses the map behind M').
struct DiffMap {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<double> values;

  double at(std::size_t y, std::size_t x) const { return values[y * width + x]; }
  bool operator==(const DiffMap&) const = default;
};

enum class EmbeddingOrigin { kEncoded, kOptimized, kSynthetic };

const char* to_string(EmbeddingOrigin origin);

// Per-token text embedding matrix; row-major n_tokens x dim.
class TokenEmbeddingMatrix {
 public:
  TokenEmbeddingMatrix(std::size_t n_tokens, std::size_t dim, std::vector<double> rows,
                       std::vector<std::string> token_strings = {},
                       EmbeddingOrigin origin = EmbeddingOrigin::kSynthetic);

  std::size_t n_tokens() const { return n_tokens_; }
  std::size_t dim() const { return dim_; }
  std::span<const double> values() const { return rows_; }
  std::span<const double> row(std::size_t k) const {
    return std::span<const double>(rows_).subspan(k * dim_, dim_);
  }
  const std::vector<std::string>& token_strings() const { return token_strings_; }
  EmbeddingOrigin origin() const { return origin_; }

  bool same_shape(const TokenEmbeddingMatrix& other) const {
    return n_tokens_ == other.n_tokens_ && dim_ == other.dim_;
  }

  // Copy with new values (same shape and token strings). Validates finiteness.
  TokenEmbeddingMatrix with_values(std::vector<double> rows, EmbeddingOrigin origin) const;

  // Mean over rows; length dim.
  std::vector<double> mean_pooled() const;

  bool operator==(const TokenEmbeddingMatrix&) const = default;

 private:
  std::size_t n_tokens_;
  std::size_t dim_;
  std::vector<double> rows_;
  std::vector<std::string> token_strings_;
  EmbeddingOrigin origin_;
};

double frobenius_distance(const TokenEmbeddingMatrix& a, const TokenEmbeddingMatrix& b);

double cosine_similarity(std::span<const double> a, std::span<const double> b);

}  // namespace tiil

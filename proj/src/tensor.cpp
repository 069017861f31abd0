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

#include "tiil/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "tiil/error.hpp"
#include "tiil/simd.hpp"

namespace tiil {

std::string to_string(const TensorShape& shape) {
  std::ostringstream os;
  os << shape.height << "x" << shape.width << "x" << shape.channels;
  return os.str();
}

Tensor::Tensor(TensorShape shape, double fill) : shape_(shape), data_(shape.numel(), fill) {}

Tensor::Tensor(TensorShape shape, std::vector<double> data)
    : shape_(shape), data_(std::move(data)) {
  if (data_.size() != shape_.numel()) {
    throw InvalidArgument("tensor data size " + std::to_string(data_.size()) +
                          " does not match shape " + to_string(shape_));
  }
}

ImageTensor::ImageTensor(Tensor tensor) : tensor_(std::move(tensor)) {
  const auto& s = tensor_.shape();
  if (s.height < kMinSide || s.width < kMinSide) {
    throw InvalidArgument("image must be at least 8x8, got " + to_string(s));
  }
  if (s.channels == 0) throw InvalidArgument("image must have at least one channel");
  for (double v : tensor_.values()) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw InvalidArgument("image values must lie in [0,1]");
    }
  }
}

ImageTensor::ImageTensor(TensorShape shape, std::vector<double> data)
    : ImageTensor(Tensor(shape, std::move(data))) {}

ImageTensor ImageTensor::filled(TensorShape shape, double value) {
  return ImageTensor(Tensor(shape, value));
}

ImageTensor ImageTensor::from_tensor(Tensor tensor) { return ImageTensor(std::move(tensor)); }

bool ImageTensor::operator==(const ImageTensor& other) const {
  return shape() == other.shape() && std::ranges::equal(values(), other.values());
}

BinaryMask::BinaryMask(std::size_t height, std::size_t width, bool value)
    : height_(height), width_(width), bits_(height * width, value ? 1 : 0) {}

BinaryMask::BinaryMask(std::size_t height, std::size_t width, std::vector<std::uint8_t> bits)
    : height_(height), width_(width), bits_(std::move(bits)) {
  if (bits_.size() != height * width) throw InvalidArgument("mask bit count mismatch");
  for (auto& b : bits_) b = b ? 1 : 0;
}

std::size_t BinaryMask::count() const {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

const char* to_string(EmbeddingOrigin origin) {
  switch (origin) {
    case EmbeddingOrigin::kEncoded:
      return "encoded";
    case EmbeddingOrigin::kOptimized:
      return "optimized";
    case EmbeddingOrigin::kSynthetic:
      return "synthetic";
  }
  return "unknown";
}

TokenEmbeddingMatrix::TokenEmbeddingMatrix(std::size_t n_tokens, std::size_t dim,
                                           std::vector<double> rows,
                                           std::vector<std::string> token_strings,
                                           EmbeddingOrigin origin)
    : n_tokens_(n_tokens),
      dim_(dim),
      rows_(std::move(rows)),
      token_strings_(std::move(token_strings)),
      origin_(origin) {
  if (n_tokens_ < 1 || dim_ < 1) throw InvalidArgument("embedding needs n_tokens >= 1, dim >= 1");
  if (rows_.size() != n_tokens_ * dim_) throw InvalidArgument("embedding value count mismatch");
  if (!token_strings_.empty() && token_strings_.size() != n_tokens_) {
    throw InvalidArgument("token_strings must be empty or one per row");
  }
  for (double v : rows_) {
    if (!std::isfinite(v)) throw InvalidArgument("embedding entries must be finite");
  }
}

TokenEmbeddingMatrix TokenEmbeddingMatrix::with_values(std::vector<double> rows,
                                                       EmbeddingOrigin origin) const {
  return TokenEmbeddingMatrix(n_tokens_, dim_, std::move(rows), token_strings_, origin);
}

std::vector<double> TokenEmbeddingMatrix::mean_pooled() const {
  std::vector<double> out(dim_, 0.0);
  for (std::size_t k = 0; k < n_tokens_; ++k) simd::axpy(1.0, row(k), out);
  for (double& v : out) v /= static_cast<double>(n_tokens_);
  return out;
}

double frobenius_distance(const TokenEmbeddingMatrix& a, const TokenEmbeddingMatrix& b) {
  if (!a.same_shape(b)) throw InvalidArgument("embedding shape mismatch");
  return std::sqrt(simd::squared_distance(a.values(), b.values()));
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  const double na = std::sqrt(simd::squared_norm(a));
  const double nb = std::sqrt(simd::squared_norm(b));
  if (na == 0.0 || nb == 0.0) throw InvalidArgument("cosine similarity of a zero vector");
  return simd::dot(a, b) / (na * nb);
}

}  // namespace tiil

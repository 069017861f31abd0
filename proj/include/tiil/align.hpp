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
#include <optional>
#include <vector>

#include "tiil/backend.hpp"
#include "tiil/tensor.hpp"

namespace tiil {

inline constexpr double kDefaultAlignLearningRate = 4e-6;

struct AlignConfig {
  // Frobenius radius around the starting embedding. Infinity disables it.
  double gamma = 8.0;
  std::size_t iterations = 500;
  // Unset: the backend's recommended rate, else kDefaultAlignLearningRate.
  std::optional<double> learning_rate;
  std::uint64_t seed = 0;
  // Loss is logged at step 0, every `loss_log_every` steps, and at the end.
  std::size_t loss_log_every = 1;
  // Record ||E - E0||_F after every projected step.
  bool record_step_distances = false;

  void validate() const;
};

double resolve_learning_rate(const AlignConfig& cfg, const BackendBundle& bundle);

struct AlignResult {
  TokenEmbeddingMatrix embedding;
  // ||image - generate(xT; E)||_2 at the logged steps.
  std::vector<double> loss_trajectory;
  double final_frobenius_distance = 0.0;
  std::vector<double> step_distances;
  // Step whose iterate was returned (0 = the starting embedding).
  std::size_t best_step = 0;
  bool diverged = false;
};

// Reconstruction objective 0.5*||G(xT; E) - image||^2 for a fixed xT.
class AlignObjective {
 public:
  AlignObjective(const ImageTensor& image, const BackendBundle& bundle, Tensor xT);

  double value(const TokenEmbeddingMatrix& e) const;
  std::vector<double> gradient(const TokenEmbeddingMatrix& e) const;
  // Both at once; `residual_norm` receives ||G - image||_2.
  std::vector<double> value_and_gradient(const TokenEmbeddingMatrix& e, double& value,
                                         double& residual_norm) const;
  const Tensor& xT() const { return xT_; }

 private:
  const ImageTensor& image_;
  const BackendBundle& bundle_;
  Tensor xT_;
};

// Starting noise for the generator: the image noised to the last timestep
// with noise drawn from `seed`.
Tensor alignment_start_noise(const ImageTensor& image, const NoiseSchedule& schedule,
                             std::uint64_t seed);

// Projected gradient descent on the objective within ||E - E0||_F <= gamma.
// Returns the lowest-loss iterate visited; on a non-finite loss it stops and
// flags `diverged`.
AlignResult align_embedding(const ImageTensor& image, const TokenEmbeddingMatrix& e0,
                            const BackendBundle& bundle, const AlignConfig& cfg);

TokenEmbeddingMatrix project_to_ball(const TokenEmbeddingMatrix& e,
                                     const TokenEmbeddingMatrix& e0, double gamma);

}  // namespace tiil

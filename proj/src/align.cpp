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

#include "tiil/align.hpp"

#include <cmath>
#include <limits>

#include "tiil/error.hpp"
#include "tiil/rng.hpp"
#include "tiil/simd.hpp"

namespace tiil {

void AlignConfig::validate() const {
  if (!(gamma >= 0.0)) throw InvalidArgument("gamma must be >= 0");
  if (iterations == 0) throw InvalidArgument("iterations must be >= 1");
  if (learning_rate && !(*learning_rate > 0.0 && std::isfinite(*learning_rate))) {
    throw InvalidArgument("learning_rate must be > 0");
  }
  if (loss_log_every == 0) throw InvalidArgument("loss_log_every must be >= 1");
}

double resolve_learning_rate(const AlignConfig& cfg, const BackendBundle& bundle) {
  if (cfg.learning_rate) return *cfg.learning_rate;
  return bundle.recommended_learning_rate.value_or(kDefaultAlignLearningRate);
}

AlignObjective::AlignObjective(const ImageTensor& image, const BackendBundle& bundle, Tensor xT)
    : image_(image), bundle_(bundle), xT_(std::move(xT)) {}

double AlignObjective::value(const TokenEmbeddingMatrix& e) const {
  const ImageTensor g = bundle_.generator->generate(xT_, e);
  return 0.5 * simd::squared_distance(g.values(), image_.values());
}

std::vector<double> AlignObjective::gradient(const TokenEmbeddingMatrix& e) const {
  double v = 0.0;
  double r = 0.0;
  return value_and_gradient(e, v, r);
}

std::vector<double> AlignObjective::value_and_gradient(const TokenEmbeddingMatrix& e,
                                                       double& value,
                                                       double& residual_norm) const {
  const ImageTensor g = bundle_.generator->generate(xT_, e);
  std::vector<double> residual(g.values().size());
  simd::axpby(1.0, g.values(), -1.0, image_.values(), residual);
  const double sq = simd::squared_norm(residual);
  value = 0.5 * sq;
  residual_norm = std::sqrt(sq);
  return bundle_.generator->generate_vjp(xT_, e, residual);
}

Tensor alignment_start_noise(const ImageTensor& image, const NoiseSchedule& schedule,
                             std::uint64_t seed) {
  Rng rng(mix_seed(seed, "xT"));
  Tensor eps(image.shape(), rng.normal_vector(image.shape().numel()));
  return forward_noise(image, schedule.size() - 1, eps, schedule);
}

TokenEmbeddingMatrix project_to_ball(const TokenEmbeddingMatrix& e,
                                     const TokenEmbeddingMatrix& e0, double gamma) {
  if (!e.same_shape(e0)) throw InvalidArgument("projection operands differ in shape");
  if (!(gamma >= 0.0)) throw InvalidArgument("gamma must be >= 0");
  const double dist = frobenius_distance(e, e0);
  if (dist <= gamma) return e;
  double scale = gamma / dist;
  std::vector<double> out(e0.values().size());
  simd::axpby(1.0 - scale, e0.values(), scale, e.values(), out);
  TokenEmbeddingMatrix projected = e.with_values(std::move(out), e.origin());
  // Rounding can leave the result a few ulps outside the ball; shrink the
  // scale until the literal E0 + scale*(E - E0) is inside.
  for (int tries = 0; tries < 64 && frobenius_distance(projected, e0) > gamma; ++tries) {
    std::vector<double> direct(e0.values().begin(), e0.values().end());
    for (std::size_t i = 0; i < direct.size(); ++i) {
      direct[i] += scale * (e.values()[i] - e0.values()[i]);
    }
    projected = e.with_values(std::move(direct), e.origin());
    scale *= 1.0 - std::ldexp(1.0, tries - 52);
  }
  return projected;
}

AlignResult align_embedding(const ImageTensor& image, const TokenEmbeddingMatrix& e0,
                            const BackendBundle& bundle, const AlignConfig& cfg) {
  cfg.validate();
  if (!bundle.capabilities.differentiable_generator) {
    throw BackendError(
        "alignment needs a differentiable generator; use the synthetic backend or a "
        "gradient-capable adapter");
  }
  if (!(image.shape() == bundle.image_shape)) {
    throw InvalidArgument("image " + to_string(image.shape()) + " does not match backend " +
                          to_string(bundle.image_shape));
  }
  const double lr = resolve_learning_rate(cfg, bundle);
  const AlignObjective objective(image, bundle, alignment_start_noise(image, bundle.schedule,
                                                                      cfg.seed));

  AlignResult result{e0, {}, 0.0, {}, 0, false};
  TokenEmbeddingMatrix current = e0.with_values(
      std::vector<double>(e0.values().begin(), e0.values().end()), EmbeddingOrigin::kOptimized);
  double best_loss = std::numeric_limits<double>::infinity();
  TokenEmbeddingMatrix best = current;

  std::vector<double> next(current.values().size());
  for (std::size_t step = 0;; ++step) {
    double value = 0.0;
    double loss = 0.0;
    std::vector<double> grad = objective.value_and_gradient(current, value, loss);
    const bool finite = std::isfinite(loss);
    if (finite && loss < best_loss) {
      best_loss = loss;
      best = current;
      result.best_step = step;
    }
    if (!finite) {
      result.diverged = true;
      break;
    }
    const bool last = step == cfg.iterations;
    if (last || step % cfg.loss_log_every == 0) result.loss_trajectory.push_back(loss);
    if (last) break;
    simd::axpby(1.0, current.values(), -lr, grad, next);
    bool grad_finite = true;
    for (double v : next) grad_finite = grad_finite && std::isfinite(v);
    if (!grad_finite) {
      result.diverged = true;
      break;
    }
    current = project_to_ball(current.with_values(next, EmbeddingOrigin::kOptimized), e0,
                              cfg.gamma);
    if (cfg.record_step_distances) {
      result.step_distances.push_back(frobenius_distance(current, e0));
    }
  }
  result.embedding = best;
  result.final_frobenius_distance = frobenius_distance(best, e0);
  return result;
}

}  // namespace tiil

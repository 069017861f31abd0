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

#include "tiil/backend.hpp"

#include <cmath>
#include <cstdlib>
#include <map>
#include <mutex>

#include "tiil/error.hpp"
#include "tiil/simd.hpp"
#include "tiil/synthetic_backend.hpp"

namespace tiil {

NoiseSchedule::NoiseSchedule(std::vector<double> alphas) : alphas_(std::move(alphas)) {
  if (alphas_.empty()) throw InvalidArgument("noise schedule is empty");
  for (double a : alphas_) {
    if (!(a > 0.0 && a <= 1.0)) {
      throw InvalidArgument("noise schedule alpha " + std::to_string(a) + " outside (0,1]");
    }
  }
}

NoiseSchedule NoiseSchedule::linear(std::size_t n, double first, double last) {
  if (n == 0) throw InvalidArgument("noise schedule is empty");
  std::vector<double> a(n);
  for (std::size_t i = 0; i < n; ++i) {
    a[i] = n == 1 ? first : first + (last - first) * static_cast<double>(i) / (n - 1);
  }
  return NoiseSchedule(std::move(a));
}

double NoiseSchedule::alpha(std::size_t t) const {
  if (t >= alphas_.size()) {
    throw InvalidArgument("timestep " + std::to_string(t) + " outside schedule of length " +
                          std::to_string(alphas_.size()));
  }
  return alphas_[t];
}

Tensor forward_noise(const Tensor& x0, std::size_t t, const Tensor& eps,
                     const NoiseSchedule& schedule) {
  if (!(x0.shape() == eps.shape())) {
    throw InvalidArgument("noise shape " + to_string(eps.shape()) + " != image shape " +
                          to_string(x0.shape()));
  }
  const double a = schedule.alpha(t);
  Tensor out(x0.shape());
  simd::axpby(std::sqrt(a), x0.values(), std::sqrt(1.0 - a), eps.values(), out.values());
  return out;
}

Tensor forward_noise(const ImageTensor& x0, std::size_t t, const Tensor& eps,
                     const NoiseSchedule& schedule) {
  return forward_noise(x0.tensor(), t, eps, schedule);
}

std::vector<double> Generator::generate_vjp(const Tensor&, const TokenEmbeddingMatrix&,
                                            std::span<const double>) const {
  throw BackendError(
      "generator is not differentiable; alignment needs the synthetic backend or a "
      "gradient-capable adapter");
}

void BackendBundle::validate() const {
  if (!text_encoder || !image_encoder || !generator || !noise_estimator || !inpainter) {
    throw BackendError("backend '" + id + "' is missing a model role");
  }
  if (!(guidance_scale > 0.0)) throw BackendError("guidance_scale must be > 0");
  if (image_shape.numel() == 0) throw BackendError("backend '" + id + "' has no image shape");
  if (recommended_learning_rate && !(*recommended_learning_rate > 0.0)) {
    throw BackendError("recommended learning rate must be > 0");
  }
  if (!(mask_noise_floor >= 0.0)) throw BackendError("mask noise floor must be >= 0");
}

BackendSelection parse_backend_selection(std::string_view selection) {
  const auto colon = selection.find(':');
  BackendSelection out;
  out.kind = std::string(selection.substr(0, colon));
  if (colon != std::string_view::npos) out.argument = std::string(selection.substr(colon + 1));
  if (out.kind.empty()) throw BackendError("empty backend selection");
  return out;
}

namespace {

std::mutex& registry_mutex() {
  static std::mutex m;
  return m;
}

std::map<std::string, BackendFactory>& registry() {
  static std::map<std::string, BackendFactory> r;
  return r;
}

}  // namespace

void register_backend_factory(const std::string& kind, BackendFactory factory) {
  std::lock_guard lock(registry_mutex());
  registry()[kind] = std::move(factory);
}

BackendBundle make_backend(std::string_view selection) {
  const BackendSelection sel = parse_backend_selection(selection);
  if (sel.kind == "synthetic") {
    std::uint64_t seed = SyntheticBackendConfig{}.seed;
    if (!sel.argument.empty()) {
      try {
        std::size_t used = 0;
        seed = std::stoull(sel.argument, &used);
        if (used != sel.argument.size()) throw std::invalid_argument("trailing characters");
      } catch (const std::exception&) {
        throw BackendError("synthetic backend seed must be an integer, got '" + sel.argument +
                           "'");
      }
    }
    SyntheticBackendConfig cfg;
    cfg.seed = seed;
    return make_synthetic_backend(cfg);
  }
  BackendFactory factory;
  {
    std::lock_guard lock(registry_mutex());
    auto it = registry().find(sel.kind);
    if (it != registry().end()) factory = it->second;
  }
  const char* dir = std::getenv("TIIL_MODEL_DIR");
  const std::string model_dir = dir != nullptr ? dir : "";
  if (!factory) {
    if (sel.kind == "diffusion") {
      throw BackendError("no diffusion adapter is registered in this build (model '" +
                         sel.argument + "', TIIL_MODEL_DIR='" + model_dir +
                         "'); use --backend synthetic");
    }
    throw BackendError("unknown backend kind '" + sel.kind + "'");
  }
  if (sel.argument.empty()) throw BackendError("backend '" + sel.kind + "' needs a model id");
  BackendBundle bundle = factory(sel.argument, model_dir);
  bundle.validate();
  return bundle;
}

}  // namespace tiil

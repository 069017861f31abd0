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

#include "tiil/maskgen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tiil/error.hpp"
#include "tiil/rng.hpp"
#include "tiil/simd.hpp"

namespace tiil {

ThresholdStrategy ThresholdStrategy::parse(const std::string& s) {
  if (s == "mean") return mean();
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size() && std::isfinite(v)) return fixed(v);
  } catch (const std::exception&) {
  }
  throw InvalidArgument("threshold strategy must be 'mean' or a number, got '" + s + "'");
}

std::string ThresholdStrategy::to_string() const {
  if (kind == Kind::kMean) return "mean";
  std::string s = std::to_string(value);
  s.erase(s.find_last_not_of('0') + 1);
  if (!s.empty() && s.back() == '.') s.pop_back();
  return s;
}

void MaskGenConfig::validate() const {
  if (n_noises == 0) throw InvalidArgument("n_noises must be >= 1");
  if (!(outlier_low >= 0.0 && outlier_low < outlier_high && outlier_high <= 100.0)) {
    throw InvalidArgument("outlier percentiles need 0 <= low < high <= 100");
  }
  if (max_components == 0) throw InvalidArgument("max_components must be >= 1");
  if (threshold.kind == ThresholdStrategy::Kind::kFixed &&
      !(threshold.value >= 0.0 && threshold.value <= 1.0)) {
    throw InvalidArgument("fixed mask threshold must be in [0,1]");
  }
  if (min_range && !(*min_range >= 0.0)) throw InvalidArgument("min_range must be >= 0");
}

std::vector<std::size_t> default_timesteps(std::size_t schedule_size, std::size_t count) {
  if (schedule_size == 0 || count == 0) return {};
  const double last = static_cast<double>(schedule_size - 1);
  const double lo = 0.2 * last;
  const double hi = 0.8 * last;
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < count; ++i) {
    const double pos = count == 1 ? 0.5 * (lo + hi) : lo + (hi - lo) * i / (count - 1);
    const auto t = static_cast<std::size_t>(std::lround(pos));
    if (out.empty() || out.back() != t) out.push_back(t);
  }
  return out;
}

std::vector<std::size_t> resolve_timesteps(const MaskGenConfig& cfg,
                                           const NoiseSchedule& schedule) {
  std::vector<std::size_t> ts =
      cfg.timesteps.empty() ? default_timesteps(schedule.size()) : cfg.timesteps;
  for (std::size_t t : ts) schedule.alpha(t);  // range check
  return ts;
}

DiffMap raw_noise_difference(const ImageTensor& image, const TokenEmbeddingMatrix& e_ref,
                             const TokenEmbeddingMatrix& e_tgt, const BackendBundle& bundle,
                             const MaskGenConfig& cfg) {
  cfg.validate();
  const auto timesteps = resolve_timesteps(cfg, bundle.schedule);
  const TensorShape shape = image.shape();
  std::vector<double> acc(shape.numel(), 0.0);
  // Noises are drawn in a fixed order and shared by both conditionings.
  for (std::size_t n = 0; n < cfg.n_noises; ++n) {
    Rng rng(mix_seed(cfg.seed, n));
    const Tensor eps(shape, rng.normal_vector(shape.numel()));
    for (std::size_t t : timesteps) {
      const Tensor xt = forward_noise(image, t, eps, bundle.schedule);
      const Tensor a = bundle.noise_estimator->estimate_noise(xt, t, e_ref);
      const Tensor b = bundle.noise_estimator->estimate_noise(xt, t, e_tgt);
      simd::abs_diff_accumulate(a.values(), b.values(), acc);
    }
  }
  const double draws = static_cast<double>(cfg.n_noises * timesteps.size());
  DiffMap map{shape.height, shape.width, std::vector<double>(shape.pixels(), 0.0)};
  for (std::size_t i = 0; i < shape.pixels(); ++i) {
    double s = 0.0;
    for (std::size_t c = 0; c < shape.channels; ++c) s += acc[i * shape.channels + c];
    map.values[i] = s / static_cast<double>(shape.channels) / draws;
  }
  return map;
}

double percentile(std::vector<double> values, double q) {
  if (values.empty()) throw InvalidArgument("percentile of an empty set");
  std::sort(values.begin(), values.end());
  const double pos = q / 100.0 * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + (values[hi] - values[lo]) * frac;
}

DiffMap normalize_difference_map(const DiffMap& raw, const MaskGenConfig& cfg,
                                 double min_range) {
  DiffMap out{raw.height, raw.width, std::vector<double>(raw.values.size(), 0.0)};
  if (raw.values.empty()) return out;
  const auto [mn, mx] = std::minmax_element(raw.values.begin(), raw.values.end());
  if (!(*mx - *mn > min_range)) return out;
  const double lo = percentile(raw.values, cfg.outlier_low);
  const double hi = percentile(raw.values, cfg.outlier_high);
  if (!(hi > lo)) return out;
  for (std::size_t i = 0; i < raw.values.size(); ++i) {
    out.values[i] = (std::clamp(raw.values[i], lo, hi) - lo) / (hi - lo);
  }
  return out;
}

double effective_min_range(const MaskGenConfig& cfg, const BackendBundle& bundle) {
  const double floor = cfg.min_range.value_or(bundle.mask_noise_floor);
  if (floor == 0.0) return 0.0;
  const auto timesteps = resolve_timesteps(cfg, bundle.schedule);
  if (timesteps.empty()) return floor;
  // An image-space difference d shows up as sqrt(a/(1-a))*d in the estimates.
  double gain = 0.0;
  for (std::size_t t : timesteps) {
    const double a = bundle.schedule.alpha(t);
    gain += a < 1.0 ? std::sqrt(a / (1.0 - a)) : 0.0;
  }
  return floor * gain / static_cast<double>(timesteps.size());
}

DiffMap noise_difference_map(const ImageTensor& image, const TokenEmbeddingMatrix& e_ref,
                             const TokenEmbeddingMatrix& e_tgt, const BackendBundle& bundle,
                             const MaskGenConfig& cfg) {
  return normalize_difference_map(raw_noise_difference(image, e_ref, e_tgt, bundle, cfg), cfg,
                                  effective_min_range(cfg, bundle));
}

BinaryMask binarize_mask(const DiffMap& map, const MaskGenConfig& cfg) {
  cfg.validate();
  const std::size_t n = map.values.size();
  if (n != map.height * map.width) throw InvalidArgument("diff map size mismatch");
  BinaryMask out(map.height, map.width);
  if (n == 0) return out;
  for (double v : map.values) {
    if (!std::isfinite(v)) throw InvalidArgument("diff map has non-finite values");
  }
  const double threshold =
      cfg.threshold.kind == ThresholdStrategy::Kind::kMean
          ? std::accumulate(map.values.begin(), map.values.end(), 0.0) / static_cast<double>(n)
          : cfg.threshold.value;

  std::vector<std::uint8_t> fg(n);
  for (std::size_t i = 0; i < n; ++i) fg[i] = map.values[i] > threshold ? 1 : 0;

  // Label in row-major scan order, so label order is first-pixel order.
  std::vector<int> label(n, -1);
  std::vector<std::size_t> area;
  std::vector<std::size_t> stack;
  const std::size_t w = map.width;
  for (std::size_t start = 0; start < n; ++start) {
    if (!fg[start] || label[start] >= 0) continue;
    const int id = static_cast<int>(area.size());
    area.push_back(0);
    label[start] = id;
    stack.push_back(start);
    while (!stack.empty()) {
      const std::size_t i = stack.back();
      stack.pop_back();
      ++area[id];
      const std::size_t y = i / w;
      const std::size_t x = i % w;
      auto visit = [&](std::size_t j) {
        if (fg[j] && label[j] < 0) {
          label[j] = id;
          stack.push_back(j);
        }
      };
      if (x > 0) visit(i - 1);
      if (x + 1 < w) visit(i + 1);
      if (y > 0) visit(i - w);
      if (y + 1 < map.height) visit(i + w);
    }
  }

  std::vector<std::size_t> order(area.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return area[a] > area[b]; });
  std::vector<std::uint8_t> keep(area.size(), 0);
  for (std::size_t r = 0; r < std::min(order.size(), cfg.max_components); ++r) keep[order[r]] = 1;

  std::vector<std::uint8_t> bits(n, 0);
  for (std::size_t i = 0; i < n; ++i) bits[i] = label[i] >= 0 && keep[label[i]] ? 1 : 0;
  return BinaryMask(map.height, map.width, std::move(bits));
}

}  // namespace tiil

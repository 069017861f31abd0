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
#include <string>
#include <vector>

#include "tiil/backend.hpp"
#include "tiil/tensor.hpp"

namespace tiil {

struct ThresholdStrategy {
  enum class Kind { kMean, kFixed };
  Kind kind = Kind::kMean;
  double value = 0.0;

  static ThresholdStrategy mean() { return {}; }
  static ThresholdStrategy fixed(double v) { return {Kind::kFixed, v}; }
  // "mean" or a number.
  static ThresholdStrategy parse(const std::string& s);
  std::string to_string() const;
  bool operator==(const ThresholdStrategy&) const = default;
};

struct MaskGenConfig {
  std::size_t n_noises = 10;
  // Empty: default_timesteps() of the backend schedule.
  std::vector<std::size_t> timesteps;
  std::uint64_t seed = 0;
  double outlier_low = 0.5;
  double outlier_high = 99.5;
  ThresholdStrategy threshold;
  std::size_t max_components = 3;
  // Overrides the backend's mask noise floor (image units).
  std::optional<double> min_range;

  void validate() const;
};

// `count` evenly spaced indices over the middle 60% of a schedule.
std::vector<std::size_t> default_timesteps(std::size_t schedule_size, std::size_t count = 5);

std::vector<std::size_t> resolve_timesteps(const MaskGenConfig& cfg,
                                           const NoiseSchedule& schedule);

// Channel-mean |eps(E_ref) - eps(E_tgt)| averaged over noises and timesteps,
// before any clamping or normalization.
DiffMap raw_noise_difference(const ImageTensor& image, const TokenEmbeddingMatrix& e_ref,
                             const TokenEmbeddingMatrix& e_tgt, const BackendBundle& bundle,
                             const MaskGenConfig& cfg);

// Percentile with linear interpolation between order statistics.
double percentile(std::vector<double> values, double q);

// Clamps to the outlier percentiles and min-max normalizes. A map whose raw
// range is at most `min_range` becomes all zeros.
DiffMap normalize_difference_map(const DiffMap& raw, const MaskGenConfig& cfg, double min_range);

// Raw-map range below which differences are treated as noise: the backend
// floor (or cfg.min_range) scaled by the mean sqrt(a/(1-a)) of the timesteps.
double effective_min_range(const MaskGenConfig& cfg, const BackendBundle& bundle);

DiffMap noise_difference_map(const ImageTensor& image, const TokenEmbeddingMatrix& e_ref,
                             const TokenEmbeddingMatrix& e_tgt, const BackendBundle& bundle,
                             const MaskGenConfig& cfg);

// Thresholds a normalized map and keeps the max_components largest
// 4-connected regions.
BinaryMask binarize_mask(const DiffMap& map, const MaskGenConfig& cfg);

}  // namespace tiil

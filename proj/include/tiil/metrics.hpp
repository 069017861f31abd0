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

#include <map>
#include <span>
#include <string>
#include <vector>

#include "tiil/tensor.hpp"

namespace tiil {

// Mean of the foreground and background IoU. A class absent from both masks
// scores 1; absent from exactly one scores 0.
double miou(const BinaryMask& pred, const BinaryMask& gt);

struct MaskPair {
  std::string id;
  const BinaryMask* pred = nullptr;
  const BinaryMask* gt = nullptr;
};

// Unweighted mean mIoU over pairs. Throws InvalidArgument naming the ids of
// pairs without a prediction.
double dataset_miou(std::span<const MaskPair> pairs);

// Labels: true = consistent (the positive class, expected to score higher).
// Exact Mann-Whitney AUC with ties counted as one half.
double roc_auc(std::span<const double> scores, std::span<const bool> labels);

struct ThresholdAccuracy {
  double accuracy = 0.0;
  double threshold = 0.0;
};

// Predicts consistent iff score >= threshold. Sweeps the midpoints of sorted
// unique scores plus thresholds that call everything one class; returns the
// best accuracy and the smallest threshold reaching it.
ThresholdAccuracy accuracy_at_best_threshold(std::span<const double> scores,
                                             std::span<const bool> labels);

double accuracy_at_threshold(std::span<const double> scores, std::span<const bool> labels,
                             double threshold);

}  // namespace tiil

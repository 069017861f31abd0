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

#include "tiil/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "tiil/error.hpp"

namespace tiil {

double miou(const BinaryMask& pred, const BinaryMask& gt) {
  if (!pred.same_size(gt.height(), gt.width())) {
    throw InvalidArgument("mIoU operands differ in size");
  }
  std::size_t inter_fg = 0, union_fg = 0, inter_bg = 0, union_bg = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const bool p = pred.at_index(i);
    const bool g = gt.at_index(i);
    inter_fg += p && g;
    union_fg += p || g;
    inter_bg += !p && !g;
    union_bg += !p || !g;
  }
  auto iou = [](std::size_t inter, std::size_t uni) {
    return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
  };
  return 0.5 * (iou(inter_fg, union_fg) + iou(inter_bg, union_bg));
}

double dataset_miou(std::span<const MaskPair> pairs) {
  std::string missing;
  for (const MaskPair& p : pairs) {
    if (p.pred == nullptr) missing += (missing.empty() ? "" : ", ") + p.id;
  }
  if (!missing.empty()) throw InvalidArgument("missing predictions for: " + missing);
  if (pairs.empty()) throw InvalidArgument("no pairs to evaluate");
  double sum = 0.0;
  for (const MaskPair& p : pairs) {
    if (p.gt == nullptr) throw InvalidArgument("pair " + p.id + " has no ground-truth mask");
    sum += miou(*p.pred, *p.gt);
  }
  return sum / static_cast<double>(pairs.size());
}

double roc_auc(std::span<const double> scores, std::span<const bool> labels) {
  if (scores.size() != labels.size()) throw InvalidArgument("scores and labels differ in length");
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  // Mid-ranks over tie groups; the U statistic follows from the positive
  // rank sum.
  double rank_sum = 0.0;
  std::size_t n_pos = 0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
    const double mid_rank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) {
      if (labels[order[k]]) {
        rank_sum += mid_rank;
        ++n_pos;
      }
    }
    i = j;
  }
  const std::size_t n_neg = scores.size() - n_pos;
  if (n_pos == 0 || n_neg == 0) throw InvalidArgument("AUC needs both classes");
  const double np = static_cast<double>(n_pos);
  const double u = rank_sum - np * (np + 1.0) / 2.0;
  return u / (np * static_cast<double>(n_neg));
}

double accuracy_at_threshold(std::span<const double> scores, std::span<const bool> labels,
                             double threshold) {
  if (scores.size() != labels.size()) throw InvalidArgument("scores and labels differ in length");
  if (scores.empty()) throw InvalidArgument("accuracy of an empty set");
  std::size_t correct = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) correct += (scores[i] >= threshold) == labels[i];
  return static_cast<double>(correct) / static_cast<double>(scores.size());
}

ThresholdAccuracy accuracy_at_best_threshold(std::span<const double> scores,
                                             std::span<const bool> labels) {
  if (scores.size() != labels.size()) throw InvalidArgument("scores and labels differ in length");
  if (scores.empty()) throw InvalidArgument("accuracy of an empty set");
  std::vector<double> u(scores.begin(), scores.end());
  std::sort(u.begin(), u.end());
  u.erase(std::unique(u.begin(), u.end()), u.end());

  std::vector<double> candidates;
  candidates.push_back(u.front());
  for (std::size_t i = 0; i + 1 < u.size(); ++i) candidates.push_back(0.5 * (u[i] + u[i + 1]));
  candidates.push_back(std::nextafter(u.back(), std::numeric_limits<double>::infinity()));

  // Sweep in ascending order so the first maximum is the smallest threshold.
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  std::size_t correct = 0;
  for (bool l : labels) correct += l;  // everything called consistent
  std::size_t below = 0;
  ThresholdAccuracy best{-1.0, 0.0};
  for (double thr : candidates) {
    while (below < order.size() && scores[order[below]] < thr) {
      if (labels[order[below]]) {
        --correct;
      } else {
        ++correct;
      }
      ++below;
    }
    const double acc = static_cast<double>(correct) / static_cast<double>(scores.size());
    if (acc > best.accuracy) best = {acc, thr};
  }
  return best;
}

}  // namespace tiil

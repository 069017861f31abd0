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

#include "tiil/evaluation.hpp"

#include <memory>

#include "tiil/error.hpp"
#include "tiil/metrics.hpp"

namespace tiil {

std::vector<BatchOutcome> analyze_records(const std::vector<DatasetRecord>& records,
                                          const AssetStore& assets, const BackendBundle& bundle,
                                          const EvaluationOptions& opts) {
  std::vector<BatchItem> items;
  items.reserve(records.size());
  for (const DatasetRecord& r : records) {
    items.push_back({r.id, assets.image(r.image_path), r.caption});
  }
  return run_batch(items, bundle, opts.pipeline, opts.seed, opts.workers);
}

namespace {

void require_success(const std::vector<DatasetRecord>& records,
                     const std::vector<BatchOutcome>& outcomes) {
  if (records.size() != outcomes.size()) {
    throw InvalidArgument("one pipeline outcome per record is required");
  }
  std::string failed;
  for (const BatchOutcome& o : outcomes) {
    if (!o.result) failed += (failed.empty() ? "" : "; ") + o.id + ": " + o.error;
  }
  if (!failed.empty()) throw InvalidArgument("pipeline failed for " + failed);
}

}  // namespace

LocalizationReport evaluate_localization(const std::vector<DatasetRecord>& records,
                                         const std::vector<BatchOutcome>& outcomes,
                                         const AssetStore& assets) {
  require_success(records, outcomes);
  LocalizationReport report;
  std::vector<BinaryMask> gts;
  std::vector<std::size_t> used;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const DatasetRecord& r = records[i];
    if (r.label != PairLabel::kInconsistent) continue;
    if (!r.gt_mask_path) {
      report.skipped.push_back(r.id);
      continue;
    }
    gts.push_back(assets.mask(*r.gt_mask_path));
    used.push_back(i);
  }
  if (used.empty()) throw InvalidArgument("no inconsistent records with a ground-truth mask");
  std::vector<MaskPair> final_pairs;
  std::vector<MaskPair> inter_pairs;
  for (std::size_t n = 0; n < used.size(); ++n) {
    const AnalysisResult& res = *outcomes[used[n]].result;
    const std::string& id = records[used[n]].id;
    final_pairs.push_back({id, &res.mask, &gts[n]});
    inter_pairs.push_back({id, &res.intermediate_mask(), &gts[n]});
    report.rows.push_back({id, miou(res.mask, gts[n]), miou(res.intermediate_mask(), gts[n]),
                           res.score});
  }
  report.miou = dataset_miou(final_pairs);
  report.miou_intermediate = dataset_miou(inter_pairs);
  return report;
}

DetectionSummary summarize_detection(std::vector<double> scores, std::vector<bool> labels) {
  DetectionSummary s;
  // std::vector<bool> has no contiguous storage; copy into a bool buffer.
  std::unique_ptr<bool[]> buf(new bool[labels.size()]);
  for (std::size_t i = 0; i < labels.size(); ++i) buf[i] = labels[i];
  const std::span<const bool> lab(buf.get(), labels.size());
  s.auc = roc_auc(scores, lab);
  const ThresholdAccuracy best = accuracy_at_best_threshold(scores, lab);
  s.accuracy = best.accuracy;
  s.threshold = best.threshold;
  s.scores = std::move(scores);
  s.labels = std::move(labels);
  return s;
}

DetectionReport evaluate_detection(const std::vector<DatasetRecord>& records,
                                   const std::vector<BatchOutcome>& outcomes,
                                   const AssetStore& assets, const BackendBundle& bundle) {
  require_success(records, outcomes);
  std::vector<double> scores;
  std::vector<bool> labels;
  for (std::size_t i = 0; i < records.size(); ++i) {
    scores.push_back(outcomes[i].result->score);
    labels.push_back(records[i].label == PairLabel::kConsistent);
  }
  return {summarize_detection(std::move(scores), std::move(labels)),
          baseline_clip_detect(records, assets, bundle)};
}

DetectionSummary baseline_clip_detect(const std::vector<DatasetRecord>& records,
                                      const AssetStore& assets, const BackendBundle& bundle) {
  if (records.empty()) throw InvalidArgument("baseline needs records");
  std::vector<double> scores;
  std::vector<bool> labels;
  for (const DatasetRecord& r : records) {
    scores.push_back(clip_score(assets.image(r.image_path), r.caption, bundle));
    labels.push_back(r.label == PairLabel::kConsistent);
  }
  return summarize_detection(std::move(scores), std::move(labels));
}

}  // namespace tiil

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
#include <map>
#include <string>
#include <vector>

#include "tiil/backend.hpp"
#include "tiil/dataset.hpp"
#include "tiil/pipeline.hpp"

namespace tiil {

struct EvaluationOptions {
  PipelineConfig pipeline;
  std::uint64_t seed = 0;
  std::size_t workers = 1;
};

// Pipeline outcome per record, in record order.
std::vector<BatchOutcome> analyze_records(const std::vector<DatasetRecord>& records,
                                          const AssetStore& assets, const BackendBundle& bundle,
                                          const EvaluationOptions& opts);

struct LocalizationRow {
  std::string id;
  double miou_final = 0.0;
  double miou_intermediate = 0.0;
  double score = 0.0;
};

struct LocalizationReport {
  double miou = 0.0;               // final mask M
  double miou_intermediate = 0.0;  // M'
  std::vector<LocalizationRow> rows;
  std::vector<std::string> skipped;  // inconsistent records without a mask
};

// mIoU over inconsistent records that carry a ground-truth mask. Throws
// InvalidArgument listing records the pipeline failed on.
LocalizationReport evaluate_localization(const std::vector<DatasetRecord>& records,
                                         const std::vector<BatchOutcome>& outcomes,
                                         const AssetStore& assets);

struct DetectionSummary {
  double auc = 0.0;
  double accuracy = 0.0;
  double threshold = 0.0;
  std::vector<double> scores;
  std::vector<bool> labels;  // true = consistent
};

DetectionSummary summarize_detection(std::vector<double> scores, std::vector<bool> labels);

struct DetectionReport {
  DetectionSummary pipeline;
  DetectionSummary baseline;
};

DetectionReport evaluate_detection(const std::vector<DatasetRecord>& records,
                                   const std::vector<BatchOutcome>& outcomes,
                                   const AssetStore& assets, const BackendBundle& bundle);

// Whole-image cosine (x100) between image and caption, no masking.
DetectionSummary baseline_clip_detect(const std::vector<DatasetRecord>& records,
                                      const AssetStore& assets, const BackendBundle& bundle);

}  // namespace tiil

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

#include <json.hpp>

#include <cstdint>
#include <string>

#include "tiil/ablation.hpp"
#include "tiil/dataset.hpp"
#include "tiil/evaluation.hpp"
#include "tiil/pipeline.hpp"

namespace tiil {

// UTC, second resolution: 2026-01-31T12:00:00Z.
std::string utc_timestamp();

nlohmann::json to_json(const PipelineConfig& cfg);
nlohmann::json to_json(const WordSpan& span);
nlohmann::json to_json(const DatasetStats& stats);
nlohmann::json to_json(const ClipScoreTable& table);
nlohmann::json to_json(const AblationReport& report);

// Analysis result schema: {score, words, mask_path, edited_image_path,
// metadata}. Wall-clock timings are left out so that identical runs give
// identical files apart from metadata.timestamp.
nlohmann::json analysis_to_json(const AnalysisResult& result, const PipelineConfig& cfg,
                                const std::string& mask_path,
                                const std::string& edited_image_path,
                                const std::string& timestamp);

// {metric, value, config, seed, backend_id, timestamp}
nlohmann::json metrics_report(const std::string& metric, nlohmann::json value,
                              nlohmann::json config, std::uint64_t seed,
                              const std::string& backend_id, const std::string& timestamp);

}  // namespace tiil

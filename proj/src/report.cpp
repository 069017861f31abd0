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

#include "tiil/report.hpp"

#include <chrono>
#include <cmath>
#include <ctime>

namespace tiil {

using nlohmann::json;

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json to_json(const PipelineConfig& cfg) {
  json align = {{"gamma", std::isinf(cfg.align.gamma) ? json("inf") : json(cfg.align.gamma)},
                {"iterations", cfg.align.iterations},
                {"loss_log_every", cfg.align.loss_log_every}};
  align["learning_rate"] = cfg.align.learning_rate ? json(*cfg.align.learning_rate) : json();
  json mask = {{"n_noises", cfg.mask.n_noises},
               {"timesteps", cfg.mask.timesteps},
               {"outlier_percentiles", {cfg.mask.outlier_low, cfg.mask.outlier_high}},
               {"threshold", cfg.mask.threshold.to_string()},
               {"max_components", cfg.mask.max_components}};
  mask["min_range"] = cfg.mask.min_range ? json(*cfg.mask.min_range) : json();
  return {{"align", align},
          {"mask", mask},
          {"top_k", cfg.top_k},
          {"init", cfg.init == AlignInit::kText ? "text" : "random"},
          {"seed", cfg.seed}};
}

json to_json(const WordSpan& span) {
  return {{"start", span.char_start},
          {"end", span.char_end},
          {"surface", span.surface},
          {"similarity", span.similarity}};
}

json to_json(const DatasetStats& stats) {
  return {{"total", stats.total},
          {"by_label", stats.by_label},
          {"by_pair_type", stats.by_pair_type},
          {"by_region_bucket", stats.by_region_bucket},
          {"by_source", stats.by_source},
          {"label_mismatches", stats.label_mismatches},
          {"missing_ground_truth", stats.missing_ground_truth}};
}

json to_json(const ClipScoreTable& table) {
  json groups = json::array();
  for (const ScoreGroup& g : table.groups) {
    groups.push_back({{"group", g.name}, {"mean_score", g.mean}, {"count", g.count}});
  }
  return {{"groups", groups}, {"notes", table.notes}};
}

json to_json(const AblationReport& report) {
  json tables = json::array();
  for (const AblationTable& t : report.tables) {
    json rows = json::array();
    for (const AblationRow& r : t.rows) {
      rows.push_back({{"strategy", r.strategy}, {"miou", r.miou}, {"pairs", r.pairs}});
    }
    tables.push_back({{"axis", t.axis}, {"rows", rows}});
  }
  return {{"tables", tables}, {"records", report.record_ids}};
}

namespace {

json align_summary(const AlignResult& r) {
  return {{"initial_loss", r.loss_trajectory.empty() ? json() : json(r.loss_trajectory.front())},
          {"final_loss", r.loss_trajectory.empty() ? json() : json(r.loss_trajectory.back())},
          {"frobenius_distance", r.final_frobenius_distance},
          {"best_step", r.best_step},
          {"diverged", r.diverged}};
}

}  // namespace

json analysis_to_json(const AnalysisResult& result, const PipelineConfig& cfg,
                      const std::string& mask_path, const std::string& edited_image_path,
                      const std::string& timestamp) {
  json words = json::array();
  for (const WordSpan& w : result.words) words.push_back(to_json(w));
  const AnalysisMetadata& m = result.metadata;
  json meta = {{"backend_id", m.backend_id},
               {"seed", m.seed},
               {"timesteps", m.timesteps},
               {"learning_rate", m.learning_rate},
               {"no_edit", m.no_edit},
               {"score_full_image", m.score_full_image},
               {"cosine", result.cosine},
               {"mask_pixels", result.mask.count()},
               {"intermediate_mask_pixels", result.intermediate_mask().count()},
               {"tokens", result.e0.token_strings()},
               {"warnings", m.warnings},
               {"align", align_summary(result.aligned)},
               {"denoise", align_summary(result.denoised)},
               {"config", to_json(cfg)},
               {"timestamp", timestamp}};
  return {{"score", result.score},
          {"words", words},
          {"mask_path", mask_path},
          {"edited_image_path", edited_image_path},
          {"metadata", meta}};
}

json metrics_report(const std::string& metric, json value, json config, std::uint64_t seed,
                    const std::string& backend_id, const std::string& timestamp) {
  return {{"metric", metric},
          {"value", std::move(value)},
          {"config", std::move(config)},
          {"seed", seed},
          {"backend_id", backend_id},
          {"timestamp", timestamp}};
}

}  // namespace tiil

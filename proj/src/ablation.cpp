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

#include "tiil/ablation.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

#include "tiil/error.hpp"
#include "tiil/maskgen.hpp"

namespace tiil {
namespace {

const std::vector<std::string>& known(const std::string& axis) {
  static const std::map<std::string, std::vector<std::string>> table = {
      {"mask_stage", {"intermediate", "final"}},
      {"init", {"default", "no_constraint", "random"}},
      {"threshold", {"0.1", "0.2", "0.3", "0.4", "mean"}},
  };
  auto it = table.find(axis);
  if (it == table.end()) {
    throw InvalidArgument("unknown ablation axis '" + axis +
                          "' (expected mask_stage, init or threshold)");
  }
  return it->second;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

AblationGrid AblationGrid::full() {
  AblationGrid g;
  for (const char* axis : {"mask_stage", "init", "threshold"}) g.axes.push_back({axis, known(axis)});
  return g;
}

AblationGrid AblationGrid::parse(const std::string& spec) {
  AblationGrid g;
  for (const std::string& part : split(spec, ';')) {
    const auto eq = part.find('=');
    if (eq == std::string::npos) throw InvalidArgument("grid entry '" + part + "' lacks '='");
    g.axes.push_back({part.substr(0, eq), split(part.substr(eq + 1), ',')});
  }
  g.validate();
  return g;
}

void AblationGrid::validate() const {
  if (axes.empty()) throw InvalidArgument("empty ablation grid");
  for (const auto& [axis, strategies] : axes) {
    const auto& allowed = known(axis);
    if (strategies.empty()) throw InvalidArgument("axis '" + axis + "' has no strategies");
    for (const std::string& s : strategies) {
      if (axis == "threshold") {
        const ThresholdStrategy t = ThresholdStrategy::parse(s);
        if (t.kind == ThresholdStrategy::Kind::kFixed && !(t.value >= 0.0 && t.value <= 1.0)) {
          throw InvalidArgument("fixed threshold must be in [0,1], got " + s);
        }
      } else if (std::find(allowed.begin(), allowed.end(), s) == allowed.end()) {
        throw InvalidArgument("unknown strategy '" + s + "' for axis '" + axis + "'");
      }
    }
  }
}

const AblationRow* AblationTable::find(const std::string& strategy) const {
  for (const AblationRow& r : rows) {
    if (r.strategy == strategy) return &r;
  }
  return nullptr;
}

const AblationTable* AblationReport::find(const std::string& axis) const {
  for (const AblationTable& t : tables) {
    if (t.axis == axis) return &t;
  }
  return nullptr;
}

AblationReport run_ablations(const std::vector<DatasetRecord>& records, const AssetStore& assets,
                             const BackendBundle& bundle, const AblationGrid& grid,
                             const EvaluationOptions& opts) {
  grid.validate();
  std::vector<DatasetRecord> subset;
  for (const DatasetRecord& r : records) {
    if (r.label == PairLabel::kInconsistent && r.gt_mask_path) subset.push_back(r);
  }
  if (subset.empty()) throw InvalidArgument("no inconsistent records with ground-truth masks");

  AblationReport report;
  report.backend_id = bundle.id;
  for (const DatasetRecord& r : subset) report.record_ids.push_back(r.id);

  // Runs are cached by the variant they differ in, so shared defaults run once.
  std::map<std::string, LocalizationReport> cache;
  auto evaluate = [&](const std::string& key, const PipelineConfig& cfg) {
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    EvaluationOptions o = opts;
    o.pipeline = cfg;
    const auto outcomes = analyze_records(subset, assets, bundle, o);
    return cache.emplace(key, evaluate_localization(subset, outcomes, assets)).first->second;
  };
  const std::string base_key = "default|" + opts.pipeline.mask.threshold.to_string();

  for (const auto& [axis, strategies] : grid.axes) {
    AblationTable table{axis, {}};
    for (const std::string& s : strategies) {
      PipelineConfig cfg = opts.pipeline;
      std::string key = base_key;
      bool intermediate = false;
      if (axis == "mask_stage") {
        intermediate = s == "intermediate";
      } else if (axis == "init") {
        if (s == "no_constraint") cfg.align.gamma = std::numeric_limits<double>::infinity();
        if (s == "random") cfg.init = AlignInit::kRandom;
        key = s + "|" + cfg.mask.threshold.to_string();
      } else {
        cfg.mask.threshold = ThresholdStrategy::parse(s);
        key = "default|" + cfg.mask.threshold.to_string();
      }
      const LocalizationReport& loc = evaluate(key, cfg);
      table.rows.push_back(
          {s, intermediate ? loc.miou_intermediate : loc.miou, loc.rows.size()});
    }
    report.tables.push_back(std::move(table));
  }
  return report;
}

}  // namespace tiil

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
#include <map>
#include <string>
#include <vector>

#include "tiil/dataset.hpp"
#include "tiil/evaluation.hpp"

namespace tiil {

// Axis name -> strategies, evaluated in the listed order.
//   mask_stage: intermediate, final
//   init:       default, no_constraint, random
//   threshold:  mean or a number in [0,1]
struct AblationGrid {
  std::vector<std::pair<std::string, std::vector<std::string>>> axes;

  static AblationGrid full();
  // "threshold=0.1,mean;init=default,random". Throws InvalidArgument on an
  // unknown axis or strategy.
  static AblationGrid parse(const std::string& spec);
  void validate() const;
};

struct AblationRow {
  std::string strategy;
  double miou = 0.0;
  std::size_t pairs = 0;
};

struct AblationTable {
  std::string axis;
  std::vector<AblationRow> rows;

  const AblationRow* find(const std::string& strategy) const;
};

struct AblationReport {
  std::vector<AblationTable> tables;
  std::vector<std::string> record_ids;  // the evaluated subset
  std::string backend_id;

  const AblationTable* find(const std::string& axis) const;
};

// Each strategy reruns the pipeline on the inconsistent records that carry a
// mask, changing only that axis of `opts.pipeline`.
AblationReport run_ablations(const std::vector<DatasetRecord>& records, const AssetStore& assets,
                             const BackendBundle& bundle, const AblationGrid& grid,
                             const EvaluationOptions& opts);

}  // namespace tiil

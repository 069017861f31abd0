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
#include <string>
#include <vector>

#include "tiil/backend.hpp"
#include "tiil/dataset.hpp"

namespace tiil {

// Planted-inconsistency benchmark on the synthetic backend. Each base caption
// has eight words ("adj noun with adj noun beside adj noun"); one content word
// is swapped for a word of the same class, and the four pair records follow.
struct PlantedBenchmarkConfig {
  std::size_t n_bases = 25;
  std::uint64_t seed = 7;
  // Per-image colour cast: uniform(0, tint_max) * N(0,1) per channel.
  double tint_max = 0.08;
  double pixel_noise = 0.01;
};

struct PlantedBenchmark {
  std::vector<DatasetRecord> records;
  MemoryAssetStore assets;
};

// Requires a synthetic bundle.
PlantedBenchmark build_planted_benchmark(const BackendBundle& bundle,
                                         const PlantedBenchmarkConfig& cfg = {});

// manifest.jsonl plus the images and masks as PNG, under `dir`.
void write_benchmark(const PlantedBenchmark& bench, const std::string& dir);

}  // namespace tiil

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
#include <optional>
#include <string>
#include <vector>

#include "tiil/align.hpp"
#include "tiil/backend.hpp"
#include "tiil/edit.hpp"
#include "tiil/maskgen.hpp"
#include "tiil/tensor.hpp"
#include "tiil/text.hpp"

namespace tiil {

// Where alignment starts and which embedding the ball is centred on.
enum class AlignInit {
  kText,    // the encoded caption E0
  kRandom,  // a seeded random embedding, drawn separately for each alignment
};

struct PipelineConfig {
  AlignConfig align;
  MaskGenConfig mask;
  std::size_t top_k = 1;
  AlignInit init = AlignInit::kText;
  double random_init_stddev = 0.7;
  // Seeds every stage; overrides align.seed and mask.seed.
  std::uint64_t seed = 0;
};

struct AnalysisMetadata {
  std::string backend_id;
  std::uint64_t seed = 0;
  std::vector<std::size_t> timesteps;
  double learning_rate = 0.0;
  bool no_edit = false;
  bool score_full_image = false;
  std::vector<std::string> warnings;
  // Wall-clock milliseconds per stage.
  std::map<std::string, double> timings_ms;
};

struct AnalysisResult {
  TokenEmbeddingMatrix e0;
  AlignResult aligned;   // Step 1 (E_aln)
  EditResult edit;       // Step 2 (M', I_edt)
  AlignResult denoised;  // Step 3 (E_dnt)
  DiffMap final_difference;
  BinaryMask mask;       // M
  std::vector<WordSpan> words;
  double score = 0.0;
  double cosine = 0.0;
  AnalysisMetadata metadata;

  const BinaryMask& intermediate_mask() const { return edit.intermediate_mask; }
  const ImageTensor& edited_image() const { return edit.edited_image; }
};

// Seeded random starting embedding for the random-init variant.
TokenEmbeddingMatrix random_embedding(const TokenEmbeddingMatrix& like, double stddev,
                                      std::uint64_t seed);

// Steps 1-4. Stage failures are rethrown as StageError tagged with the stage.
AnalysisResult analyze(const ImageTensor& image, const std::string& text,
                       const BackendBundle& bundle, const PipelineConfig& cfg);

enum class Label { kConsistent, kInconsistent };
const char* to_string(Label label);

// Inconsistent iff score < threshold; threshold in [0,100].
Label detect(double score, double threshold);
Label detect(const AnalysisResult& result, double threshold);

struct BatchItem {
  std::string id;
  ImageTensor image;
  std::string text;
};

struct BatchOutcome {
  std::string id;
  std::optional<AnalysisResult> result;
  std::string error;
};

// Runs analyze on every item with seed mix_seed(global_seed, id). Uses up to
// `workers` threads when the backend allows concurrent inference. Output
// order follows the input.
std::vector<BatchOutcome> run_batch(const std::vector<BatchItem>& items,
                                    const BackendBundle& bundle, const PipelineConfig& cfg,
                                    std::uint64_t global_seed, std::size_t workers);

std::uint64_t pair_seed(std::uint64_t global_seed, const std::string& pair_id);

}  // namespace tiil

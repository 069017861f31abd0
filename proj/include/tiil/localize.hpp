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
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tiil/backend.hpp"
#include "tiil/maskgen.hpp"
#include "tiil/tensor.hpp"
#include "tiil/text.hpp"

namespace tiil {

inline constexpr const char* kWordTemplatePrefix = "A photo of ";
inline constexpr std::size_t kMaxSpanWords = 4;

// Same procedure as the edit-stage mask, conditioned on (E_aln, E_dnt).
BinaryMask final_mask(const ImageTensor& image, const TokenEmbeddingMatrix& e_aln,
                      const TokenEmbeddingMatrix& e_dnt, const BackendBundle& bundle,
                      const MaskGenConfig& cfg, DiffMap* difference = nullptr);

// Runs of 1..kMaxSpanWords words that start and end on a non-stopword.
std::vector<WordSpan> candidate_spans(std::string_view text);

// Ranks candidate spans by cosine between the templated span text and the
// masked edited image, keeping the top_k that do not overlap a better one.
// An empty mask falls back to the whole image.
std::vector<WordSpan> localize_words(std::string_view text, const ImageTensor& edited,
                                     const BinaryMask& mask, const BackendBundle& bundle,
                                     std::size_t top_k = 1);

struct ScoreResult {
  double score = 0.0;   // r in [0,100]
  double cosine = 0.0;
  // The mask was empty and the whole image was encoded.
  bool full_image = false;
};

// 100 * clamp(c, 0, 1).
double score_from_cosine(double c);

ScoreResult consistency_score(const ImageTensor& image, const BinaryMask& mask,
                              std::span<const double> text_vector, const BackendBundle& bundle);

}  // namespace tiil

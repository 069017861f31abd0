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

#include "tiil/localize.hpp"

#include <algorithm>
#include <cmath>

#include "tiil/error.hpp"
#include "tiil/simd.hpp"

namespace tiil {

BinaryMask final_mask(const ImageTensor& image, const TokenEmbeddingMatrix& e_aln,
                      const TokenEmbeddingMatrix& e_dnt, const BackendBundle& bundle,
                      const MaskGenConfig& cfg, DiffMap* difference) {
  DiffMap map = noise_difference_map(image, e_aln, e_dnt, bundle, cfg);
  BinaryMask mask = binarize_mask(map, cfg);
  if (difference != nullptr) *difference = std::move(map);
  return mask;
}

std::vector<WordSpan> candidate_spans(std::string_view text) {
  const auto words = tokenize_words(text);
  std::vector<WordSpan> out;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (is_stopword(words[i].lower)) continue;
    for (std::size_t j = i; j < words.size() && j < i + kMaxSpanWords; ++j) {
      if (is_stopword(words[j].lower)) continue;
      WordSpan s;
      s.char_start = words[i].begin;
      s.char_end = words[j].end;
      s.surface = std::string(text.substr(s.char_start, s.char_end - s.char_start));
      out.push_back(std::move(s));
    }
  }
  return out;
}

std::vector<WordSpan> localize_words(std::string_view text, const ImageTensor& edited,
                                     const BinaryMask& mask, const BackendBundle& bundle,
                                     std::size_t top_k) {
  if (tokenize_words(text).empty()) throw InvalidArgument("empty text");
  std::vector<WordSpan> candidates = candidate_spans(text);
  if (candidates.empty() || top_k == 0) return {};
  const std::vector<double> image_vec =
      bundle.image_encoder->encode_image(edited, mask.empty() ? nullptr : &mask);
  for (WordSpan& c : candidates) {
    const EncodedText enc = bundle.text_encoder->encode_text(kWordTemplatePrefix + c.surface);
    c.similarity = cosine_similarity(enc.embedding.mean_pooled(), image_vec);
  }
  // Ties go to the earlier, then shorter, span.
  std::stable_sort(candidates.begin(), candidates.end(), [](const WordSpan& a, const WordSpan& b) {
    return a.similarity > b.similarity;
  });
  std::vector<WordSpan> out;
  for (WordSpan& c : candidates) {
    if (out.size() == top_k) break;
    const bool clash = std::any_of(out.begin(), out.end(),
                                   [&](const WordSpan& kept) { return spans_overlap(kept, c); });
    if (!clash) out.push_back(std::move(c));
  }
  return out;
}

double score_from_cosine(double c) { return 100.0 * std::clamp(c, 0.0, 1.0); }

ScoreResult consistency_score(const ImageTensor& image, const BinaryMask& mask,
                              std::span<const double> text_vector, const BackendBundle& bundle) {
  if (simd::squared_norm(text_vector) == 0.0) throw InvalidArgument("text vector is zero");
  if (!mask.same_size(image.height(), image.width())) {
    throw InvalidArgument("mask size does not match image");
  }
  ScoreResult r;
  r.full_image = mask.empty();
  const auto v = bundle.image_encoder->encode_image(image, r.full_image ? nullptr : &mask);
  r.cosine = cosine_similarity(v, text_vector);
  r.score = score_from_cosine(r.cosine);
  return r;
}

}  // namespace tiil

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

#include "tiil/pipeline.hpp"

#include <atomic>
#include <chrono>
#include <thread>

#include "tiil/error.hpp"
#include "tiil/localize.hpp"
#include "tiil/rng.hpp"

namespace tiil {
namespace {

template <typename F>
auto run_stage(const char* stage, AnalysisMetadata& meta, F&& f) {
  const auto start = std::chrono::steady_clock::now();
  try {
    auto out = f();
    meta.timings_ms[stage] =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
            .count();
    return out;
  } catch (const StageError&) {
    throw;
  } catch (const InvalidArgument& e) {
    throw StageError(stage, StageError::Cause::kInvalidArgument, e.what());
  } catch (const BackendError& e) {
    throw StageError(stage, StageError::Cause::kBackend, e.what());
  } catch (const DataError& e) {
    throw StageError(stage, StageError::Cause::kData, e.what());
  } catch (const std::exception& e) {
    throw StageError(stage, StageError::Cause::kOther, e.what());
  }
}

}  // namespace

TokenEmbeddingMatrix random_embedding(const TokenEmbeddingMatrix& like, double stddev,
                                      std::uint64_t seed) {
  Rng rng(seed);
  return like.with_values(rng.normal_vector(like.values().size(), stddev),
                          EmbeddingOrigin::kSynthetic);
}

AnalysisResult analyze(const ImageTensor& image, const std::string& text,
                       const BackendBundle& bundle, const PipelineConfig& cfg) {
  AnalysisMetadata meta;
  meta.backend_id = bundle.id;
  meta.seed = cfg.seed;

  AlignConfig align_cfg = cfg.align;
  align_cfg.seed = mix_seed(cfg.seed, "align");
  MaskGenConfig mask_cfg = cfg.mask;
  mask_cfg.seed = mix_seed(cfg.seed, "mask");
  meta.learning_rate = resolve_learning_rate(align_cfg, bundle);

  EncodedText encoded = run_stage("encode_text", meta, [&] {
    if (text.empty()) throw InvalidArgument("empty text");
    return bundle.text_encoder->encode_text(text);
  });
  meta.warnings = encoded.warnings;
  const TokenEmbeddingMatrix& e0 = encoded.embedding;
  meta.timesteps = run_stage("timesteps", meta,
                             [&] { return resolve_timesteps(mask_cfg, bundle.schedule); });

  // The random variant starts each alignment from its own random embedding.
  auto start_for = [&](const char* salt) {
    if (cfg.init == AlignInit::kText) return e0;
    return random_embedding(e0, cfg.random_init_stddev, mix_seed(cfg.seed, salt));
  };

  AlignResult aligned = run_stage("align", meta, [&] {
    return align_embedding(image, start_for("init_align"), bundle, align_cfg);
  });
  EditResult edit = run_stage(
      "edit", meta, [&] { return edit_image(image, e0, aligned.embedding, bundle, mask_cfg); });
  meta.no_edit = edit.no_edit;
  AlignResult denoised = run_stage("denoise", meta, [&] {
    return align_embedding(edit.edited_image, start_for("init_denoise"), bundle, align_cfg);
  });
  DiffMap final_diff;
  BinaryMask mask = run_stage("final_mask", meta, [&] {
    return final_mask(image, aligned.embedding, denoised.embedding, bundle, mask_cfg,
                      &final_diff);
  });
  std::vector<WordSpan> words = run_stage("localize", meta, [&] {
    return localize_words(text, edit.edited_image, mask, bundle, cfg.top_k);
  });
  ScoreResult score = run_stage(
      "score", meta, [&] { return consistency_score(image, mask, e0.mean_pooled(), bundle); });
  meta.score_full_image = score.full_image;

  return AnalysisResult{e0,
                        std::move(aligned),
                        std::move(edit),
                        std::move(denoised),
                        std::move(final_diff),
                        std::move(mask),
                        std::move(words),
                        score.score,
                        score.cosine,
                        std::move(meta)};
}

const char* to_string(Label label) {
  return label == Label::kConsistent ? "consistent" : "inconsistent";
}

Label detect(double score, double threshold) {
  if (!(threshold >= 0.0 && threshold <= 100.0)) {
    throw InvalidArgument("detection threshold must be in [0,100]");
  }
  return score < threshold ? Label::kInconsistent : Label::kConsistent;
}

Label detect(const AnalysisResult& result, double threshold) {
  return detect(result.score, threshold);
}

std::uint64_t pair_seed(std::uint64_t global_seed, const std::string& pair_id) {
  return mix_seed(global_seed, pair_id);
}

std::vector<BatchOutcome> run_batch(const std::vector<BatchItem>& items,
                                    const BackendBundle& bundle, const PipelineConfig& cfg,
                                    std::uint64_t global_seed, std::size_t workers) {
  std::vector<BatchOutcome> out(items.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < items.size(); i = next++) {
      const BatchItem& item = items[i];
      PipelineConfig local = cfg;
      local.seed = pair_seed(global_seed, item.id);
      out[i].id = item.id;
      try {
        out[i].result = analyze(item.image, item.text, bundle, local);
      } catch (const std::exception& e) {
        out[i].error = e.what();
      }
    }
  };
  if (!bundle.capabilities.concurrent_inference) workers = 1;
  workers = std::max<std::size_t>(1, std::min(workers, items.size()));
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  return out;
}

}  // namespace tiil

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

#include "tiil/benchmark.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <filesystem>
#include <string_view>

#include "tiil/error.hpp"
#include "tiil/image_io.hpp"
#include "tiil/rng.hpp"
#include "tiil/synthetic_backend.hpp"

namespace tiil {
namespace {

constexpr std::array<std::string_view, 32> kAdjectives = {
    "red",    "blue",   "green",  "yellow", "purple", "orange", "black",  "white",
    "small",  "large",  "old",    "young",  "wooden", "metal",  "shiny",  "dusty",
    "wet",    "dry",    "bright", "dark",   "quiet",  "noisy",  "round",  "square",
    "soft",   "hard",   "striped", "spotted", "tall",  "short",  "broken", "new",
};
constexpr std::array<std::string_view, 32> kNouns = {
    "dog",    "cat",    "horse",  "bicycle", "car",    "boat",   "tree",   "house",
    "bridge", "lamp",   "chair",  "table",   "apple",  "banana", "kite",   "train",
    "bird",   "flower", "river",  "mountain", "road",  "clock",  "guitar", "umbrella",
    "cup",    "bottle", "book",   "window",  "fence",  "bench",  "truck",  "tower",
};
// Word positions of the caption template; 2 and 5 are the fixed stopwords.
constexpr std::array<std::size_t, 3> kAdjectiveSlots = {0, 3, 6};
constexpr std::array<std::size_t, 3> kNounSlots = {1, 4, 7};

template <std::size_t N>
std::vector<std::string_view> pick_distinct(Rng& rng, const std::array<std::string_view, N>& from,
                                            std::size_t count) {
  std::vector<std::string_view> pool(from.begin(), from.end());
  std::vector<std::string_view> out;
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t j = rng.below(pool.size());
    out.push_back(pool[j]);
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(j));
  }
  return out;
}

std::string join(const std::vector<std::string>& words) {
  std::string s;
  for (const auto& w : words) s += (s.empty() ? "" : " ") + w;
  return s;
}

std::string base_name(std::size_t i) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "base%03zu", i);
  return buf;
}

}  // namespace

PlantedBenchmark build_planted_benchmark(const BackendBundle& bundle,
                                         const PlantedBenchmarkConfig& cfg) {
  const auto synth = as_synthetic(bundle);
  if (!synth) throw BackendError("the planted benchmark needs the synthetic backend");
  PlantedBenchmark bench;
  Rng rng(mix_seed(cfg.seed, "planted"));
  for (std::size_t b = 0; b < cfg.n_bases; ++b) {
    const auto adjs = pick_distinct(rng, kAdjectives, 3);
    const auto nouns = pick_distinct(rng, kNouns, 3);
    std::vector<std::string> words(8);
    for (std::size_t i = 0; i < 3; ++i) {
      words[kAdjectiveSlots[i]] = adjs[i];
      words[kNounSlots[i]] = nouns[i];
    }
    words[2] = "with";
    words[5] = "beside";

    const std::size_t which = rng.below(6);
    const bool adjective = which < 3;
    const std::size_t slot = adjective ? kAdjectiveSlots[which] : kNounSlots[which - 3];
    std::string replacement;
    do {
      replacement = adjective ? kAdjectives[rng.below(kAdjectives.size())]
                              : kNouns[rng.below(kNouns.size())];
    } while (std::find(words.begin(), words.end(), replacement) != words.end());

    const std::string caption = join(words);
    const TokenEmbeddingMatrix e = synth->encode_text(caption).embedding;
    const ImageTensor clean = synth->render(e);
    std::array<double, 3> tint{};
    const double tint_scale = rng.uniform(0.0, cfg.tint_max);
    for (double& t : tint) t = tint_scale * rng.normal();
    std::vector<double> px(clean.values().begin(), clean.values().end());
    for (std::size_t i = 0; i < px.size(); ++i) {
      px[i] = std::clamp(px[i] + tint[i % 3] + cfg.pixel_noise * rng.normal(), 0.0, 1.0);
    }
    const ImageTensor image = quantize_8bit(ImageTensor(clean.shape(), std::move(px)));

    const std::string name = base_name(b);
    DatasetRecord base;
    base.id = name;
    base.image_path = "images/" + name + ".png";
    base.caption = caption;
    base.source = ImageSourceKind::kGenerated;
    EditSpec spec{name, "masks/" + name + ".png", words[slot], replacement};
    const BinaryMask region = SyntheticBackend::strip_mask(slot);

    GeneratedPairs pairs = generate_pairs(base, image, region, spec, bundle,
                                          "images/" + name + "_edit.png");
    bench.assets.put_image(base.image_path, image);
    bench.assets.put_image(pairs.records[1].image_path, quantize_8bit(pairs.edited_image));
    bench.assets.put_mask(spec.region_mask_path, region);
    for (DatasetRecord& r : pairs.records) bench.records.push_back(std::move(r));
  }
  return bench;
}

void write_benchmark(const PlantedBenchmark& bench, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(fs::path(dir) / "images");
  fs::create_directories(fs::path(dir) / "masks");
  for (const auto& [path, image] : bench.assets.images()) {
    write_png_image((fs::path(dir) / path).string(), image);
  }
  for (const auto& [path, mask] : bench.assets.masks()) {
    write_png_mask((fs::path(dir) / path).string(), mask);
  }
  write_manifest((fs::path(dir) / "manifest.jsonl").string(), bench.records);
}

}  // namespace tiil

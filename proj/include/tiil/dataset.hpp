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

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tiil/backend.hpp"
#include "tiil/tensor.hpp"
#include "tiil/text.hpp"

namespace tiil {

enum class PairType { kOrigOrig, kEditEditText, kOrigEditText, kEditOrigText };
enum class PairLabel { kConsistent, kInconsistent };
enum class ImageSourceKind { kReal, kGenerated };
enum class RegionBucket { kLarge, kMedium, kSmall, kNone };

const char* to_string(PairType v);
const char* to_string(PairLabel v);
const char* to_string(ImageSourceKind v);
const char* to_string(RegionBucket v);
PairType parse_pair_type(const std::string& s);
PairLabel parse_pair_label(const std::string& s);
ImageSourceKind parse_image_source(const std::string& s);
RegionBucket parse_region_bucket(const std::string& s);

// orig_orig and edit_editText are the consistent pair types.
PairLabel label_for(PairType type);

// large > 200x200 pixels, medium in [100x100, 200x200], small below; 0 -> none.
RegionBucket bucket_for_area(std::size_t pixels);

struct DatasetRecord {
  std::string id;
  std::string image_path;
  std::string caption;
  PairType pair_type = PairType::kOrigOrig;
  PairLabel label = PairLabel::kConsistent;
  std::optional<std::string> gt_mask_path;
  std::vector<WordSpan> gt_spans;
  ImageSourceKind source = ImageSourceKind::kReal;
  RegionBucket region_bucket = RegionBucket::kNone;

  bool operator==(const DatasetRecord&) const = default;
};

// Empty when the record satisfies every invariant, else the first problem.
std::string validate_record(const DatasetRecord& r);

std::string record_to_json_line(const DatasetRecord& r);
// Throws DataError on malformed JSON or invariant violations.
DatasetRecord record_from_json_line(const std::string& line);

struct ManifestError {
  std::size_t line = 0;  // 1-based
  std::string message;
};

struct Manifest {
  std::string path;
  std::string base_dir;  // relative paths resolve against this
  std::vector<DatasetRecord> records;
  std::vector<ManifestError> errors;
};

// Bad lines are skipped and reported in `errors`; an unreadable file throws
// DataError.
Manifest load_manifest(const std::string& path);
void write_manifest(const std::string& path, const std::vector<DatasetRecord>& records);

std::string resolve_path(const std::string& base_dir, const std::string& path);

// Image and mask lookup by manifest path.
class AssetStore {
 public:
  virtual ~AssetStore() = default;
  virtual ImageTensor image(const std::string& path) const = 0;
  virtual BinaryMask mask(const std::string& path) const = 0;
};

class FileAssetStore final : public AssetStore {
 public:
  explicit FileAssetStore(std::string base_dir) : base_dir_(std::move(base_dir)) {}
  ImageTensor image(const std::string& path) const override;
  BinaryMask mask(const std::string& path) const override;

 private:
  std::string base_dir_;
};

class MemoryAssetStore final : public AssetStore {
 public:
  void put_image(const std::string& path, ImageTensor image);
  void put_mask(const std::string& path, BinaryMask mask);
  ImageTensor image(const std::string& path) const override;
  BinaryMask mask(const std::string& path) const override;
  const std::map<std::string, ImageTensor>& images() const { return images_; }
  const std::map<std::string, BinaryMask>& masks() const { return masks_; }

 private:
  std::map<std::string, ImageTensor> images_;
  std::map<std::string, BinaryMask> masks_;
};

struct EditSpec {
  std::string base_record_id;
  std::string region_mask_path;
  std::string original_term;
  std::string replacement_term;
};

std::vector<EditSpec> load_edit_specs(const std::string& path);

struct GeneratedPairs {
  // {I,T}, {I_e,T_m}, {I,T_m}, {I_e,T}
  std::array<DatasetRecord, 4> records;
  ImageTensor edited_image;
  std::string edited_caption;
};

// Replaces the first whole-word occurrence of the original term, inpaints the
// region under the edited caption and emits the four pair records.
GeneratedPairs generate_pairs(const DatasetRecord& base, const ImageTensor& image,
                              const BinaryMask& region, const EditSpec& spec,
                              const BackendBundle& bundle, const std::string& edited_image_path);

struct DatasetStats {
  std::size_t total = 0;
  std::map<std::string, std::size_t> by_label;
  std::map<std::string, std::size_t> by_pair_type;
  std::map<std::string, std::size_t> by_region_bucket;
  std::map<std::string, std::size_t> by_source;
  std::size_t label_mismatches = 0;
  std::size_t missing_ground_truth = 0;

  bool operator==(const DatasetStats&) const = default;
};

// Counts only; totals are never enforced.
DatasetStats validate_stats(const std::vector<DatasetRecord>& records);

struct ScoreGroup {
  std::string name;
  double mean = 0.0;
  std::size_t count = 0;
};

struct ClipScoreTable {
  std::vector<ScoreGroup> groups;
  std::vector<std::string> notes;

  const ScoreGroup* find(const std::string& name) const;
};

// 100 * cos(whole-image embedding, mean-pooled caption embedding).
double clip_score(const ImageTensor& image, const std::string& caption,
                  const BackendBundle& bundle);

// Mean clip_score per group: real consistent, generated consistent, random
// swap (consistent images with captions deranged by a seeded permutation),
// and inconsistent pairs. Empty groups are omitted with a note.
ClipScoreTable clip_score_table(const std::vector<DatasetRecord>& records,
                                const AssetStore& assets, const BackendBundle& bundle,
                                std::uint64_t seed);

// A permutation with no fixed points (n >= 2).
std::vector<std::size_t> seeded_derangement(std::size_t n, std::uint64_t seed);

}  // namespace tiil

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

#include "tiil/dataset.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <set>

#include "tiil/error.hpp"
#include "tiil/image_io.hpp"
#include "tiil/rng.hpp"

namespace tiil {

using nlohmann::json;

namespace {

template <typename E, std::size_t N>
E parse_enum(const std::string& s, const std::array<std::pair<E, const char*>, N>& table,
             const char* what) {
  for (const auto& [v, name] : table) {
    if (s == name) return v;
  }
  throw DataError(std::string("unknown ") + what + " '" + s + "'");
}

template <typename E, std::size_t N>
const char* enum_name(E v, const std::array<std::pair<E, const char*>, N>& table) {
  for (const auto& [e, name] : table) {
    if (e == v) return name;
  }
  return "?";
}

constexpr std::array<std::pair<PairType, const char*>, 4> kPairTypes{{
    {PairType::kOrigOrig, "orig_orig"},
    {PairType::kEditEditText, "edit_editText"},
    {PairType::kOrigEditText, "orig_editText"},
    {PairType::kEditOrigText, "edit_origText"},
}};
constexpr std::array<std::pair<PairLabel, const char*>, 2> kLabels{{
    {PairLabel::kConsistent, "consistent"},
    {PairLabel::kInconsistent, "inconsistent"},
}};
constexpr std::array<std::pair<ImageSourceKind, const char*>, 2> kSources{{
    {ImageSourceKind::kReal, "real"},
    {ImageSourceKind::kGenerated, "generated"},
}};
constexpr std::array<std::pair<RegionBucket, const char*>, 4> kBuckets{{
    {RegionBucket::kLarge, "large"},
    {RegionBucket::kMedium, "medium"},
    {RegionBucket::kSmall, "small"},
    {RegionBucket::kNone, "none"},
}};

}  // namespace

const char* to_string(PairType v) { return enum_name(v, kPairTypes); }
const char* to_string(PairLabel v) { return enum_name(v, kLabels); }
const char* to_string(ImageSourceKind v) { return enum_name(v, kSources); }
const char* to_string(RegionBucket v) { return enum_name(v, kBuckets); }
PairType parse_pair_type(const std::string& s) { return parse_enum(s, kPairTypes, "pair_type"); }
PairLabel parse_pair_label(const std::string& s) { return parse_enum(s, kLabels, "label"); }
ImageSourceKind parse_image_source(const std::string& s) {
  return parse_enum(s, kSources, "source");
}
RegionBucket parse_region_bucket(const std::string& s) {
  return parse_enum(s, kBuckets, "region_bucket");
}

PairLabel label_for(PairType type) {
  return type == PairType::kOrigOrig || type == PairType::kEditEditText
             ? PairLabel::kConsistent
             : PairLabel::kInconsistent;
}

RegionBucket bucket_for_area(std::size_t pixels) {
  if (pixels == 0) return RegionBucket::kNone;
  if (pixels > 200 * 200) return RegionBucket::kLarge;
  if (pixels >= 100 * 100) return RegionBucket::kMedium;
  return RegionBucket::kSmall;
}

std::string validate_record(const DatasetRecord& r) {
  if (r.id.empty()) return "empty id";
  if (r.image_path.empty()) return "empty image_path";
  if (r.caption.empty()) return "empty caption";
  if (label_for(r.pair_type) != r.label) {
    return std::string("label ") + to_string(r.label) + " contradicts pair_type " +
           to_string(r.pair_type);
  }
  if (r.label == PairLabel::kInconsistent && !r.gt_mask_path && r.gt_spans.empty()) {
    return "inconsistent record without gt_mask_path or gt_spans";
  }
  if (r.gt_mask_path && r.gt_mask_path->empty()) return "empty gt_mask_path";
  for (const WordSpan& s : r.gt_spans) {
    if (!span_matches(s, r.caption)) {
      return "gt span [" + std::to_string(s.char_start) + "," + std::to_string(s.char_end) +
             ") does not slice the caption to '" + s.surface + "'";
    }
  }
  return {};
}

std::string record_to_json_line(const DatasetRecord& r) {
  json j;
  j["id"] = r.id;
  j["image_path"] = r.image_path;
  j["caption"] = r.caption;
  j["pair_type"] = to_string(r.pair_type);
  j["label"] = to_string(r.label);
  if (r.gt_mask_path) j["gt_mask_path"] = *r.gt_mask_path;
  j["gt_spans"] = json::array();
  for (const WordSpan& s : r.gt_spans) {
    j["gt_spans"].push_back(
        {{"start", s.char_start}, {"end", s.char_end}, {"surface", s.surface},
         {"similarity", s.similarity}});
  }
  j["source"] = to_string(r.source);
  j["region_bucket"] = to_string(r.region_bucket);
  return j.dump();
}

DatasetRecord record_from_json_line(const std::string& line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    throw DataError(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw DataError("record is not a JSON object");
  auto str = [&](const char* key) -> std::string {
    if (!j.contains(key)) throw DataError(std::string("missing field '") + key + "'");
    if (!j[key].is_string()) throw DataError(std::string("field '") + key + "' must be a string");
    return j[key].get<std::string>();
  };
  DatasetRecord r;
  r.id = str("id");
  r.image_path = str("image_path");
  r.caption = str("caption");
  r.pair_type = parse_pair_type(str("pair_type"));
  r.label = parse_pair_label(str("label"));
  if (j.contains("gt_mask_path") && !j["gt_mask_path"].is_null()) r.gt_mask_path = str("gt_mask_path");
  if (j.contains("gt_spans")) {
    if (!j["gt_spans"].is_array()) throw DataError("field 'gt_spans' must be an array");
    for (const json& s : j["gt_spans"]) {
      try {
        WordSpan w;
        w.char_start = s.at("start").get<std::size_t>();
        w.char_end = s.at("end").get<std::size_t>();
        w.surface = s.at("surface").get<std::string>();
        if (s.contains("similarity")) w.similarity = s["similarity"].get<double>();
        r.gt_spans.push_back(std::move(w));
      } catch (const json::exception& e) {
        throw DataError(std::string("bad gt_spans entry: ") + e.what());
      }
    }
  }
  r.source = j.contains("source") ? parse_image_source(str("source")) : ImageSourceKind::kReal;
  r.region_bucket =
      j.contains("region_bucket") ? parse_region_bucket(str("region_bucket")) : RegionBucket::kNone;
  if (const std::string problem = validate_record(r); !problem.empty()) throw DataError(problem);
  return r;
}

Manifest load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read manifest '" + path + "'");
  Manifest m;
  m.path = path;
  m.base_dir = std::filesystem::path(path).parent_path().string();
  std::set<std::string> seen;
  std::string line;
  for (std::size_t n = 1; std::getline(in, line); ++n) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (std::all_of(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); })) {
      continue;
    }
    try {
      DatasetRecord r = record_from_json_line(line);
      if (!seen.insert(r.id).second) throw DataError("duplicate id '" + r.id + "'");
      m.records.push_back(std::move(r));
    } catch (const DataError& e) {
      m.errors.push_back({n, e.what()});
    }
  }
  if (in.bad()) throw DataError("error while reading manifest '" + path + "'");
  return m;
}

void write_manifest(const std::string& path, const std::vector<DatasetRecord>& records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write manifest '" + path + "'");
  for (const DatasetRecord& r : records) out << record_to_json_line(r) << '\n';
  if (!out) throw DataError("error while writing manifest '" + path + "'");
}

std::string resolve_path(const std::string& base_dir, const std::string& path) {
  const std::filesystem::path p(path);
  if (p.is_absolute() || base_dir.empty()) return path;
  return (std::filesystem::path(base_dir) / p).string();
}

ImageTensor FileAssetStore::image(const std::string& path) const {
  return read_png_image(resolve_path(base_dir_, path));
}

BinaryMask FileAssetStore::mask(const std::string& path) const {
  return read_png_mask(resolve_path(base_dir_, path));
}

void MemoryAssetStore::put_image(const std::string& path, ImageTensor image) {
  images_.insert_or_assign(path, std::move(image));
}

void MemoryAssetStore::put_mask(const std::string& path, BinaryMask mask) {
  masks_.insert_or_assign(path, std::move(mask));
}

ImageTensor MemoryAssetStore::image(const std::string& path) const {
  auto it = images_.find(path);
  if (it == images_.end()) throw DataError("no image '" + path + "'");
  return it->second;
}

BinaryMask MemoryAssetStore::mask(const std::string& path) const {
  auto it = masks_.find(path);
  if (it == masks_.end()) throw DataError("no mask '" + path + "'");
  return it->second;
}

std::vector<EditSpec> load_edit_specs(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read edits file '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw DataError("edits file '" + path + "': " + e.what());
  }
  if (!j.is_array()) throw DataError("edits file must hold a JSON list");
  std::vector<EditSpec> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    try {
      const json& e = j[i];
      out.push_back({e.at("base_record_id").get<std::string>(),
                     e.at("region_mask_path").get<std::string>(),
                     e.at("original_term").get<std::string>(),
                     e.at("replacement_term").get<std::string>()});
    } catch (const json::exception& e) {
      throw DataError("edit " + std::to_string(i) + ": " + e.what());
    }
  }
  return out;
}

namespace {

bool is_word_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '\'' ||
         static_cast<unsigned char>(c) >= 0x80;
}

// First occurrence of `term` not glued to neighbouring word characters.
std::size_t find_whole_word(const std::string& text, const std::string& term) {
  for (std::size_t pos = text.find(term); pos != std::string::npos;
       pos = text.find(term, pos + 1)) {
    const bool left = pos == 0 || !is_word_char(text[pos - 1]);
    const std::size_t end = pos + term.size();
    const bool right = end == text.size() || !is_word_char(text[end]);
    if (left && right) return pos;
  }
  return std::string::npos;
}

}  // namespace

GeneratedPairs generate_pairs(const DatasetRecord& base, const ImageTensor& image,
                              const BinaryMask& region, const EditSpec& spec,
                              const BackendBundle& bundle, const std::string& edited_image_path) {
  if (spec.original_term.empty() || spec.replacement_term.empty()) {
    throw InvalidArgument("edit terms must be non-empty");
  }
  if (spec.original_term == spec.replacement_term) {
    throw InvalidArgument("replacement term equals the original term '" + spec.original_term +
                          "'");
  }
  if (!region.same_size(image.height(), image.width())) {
    throw InvalidArgument("region mask does not match the image size");
  }
  const std::size_t pos = find_whole_word(base.caption, spec.original_term);
  if (pos == std::string::npos) {
    throw InvalidArgument("term '" + spec.original_term + "' not found in caption of " + base.id);
  }
  std::string edited_caption = base.caption;
  edited_caption.replace(pos, spec.original_term.size(), spec.replacement_term);
  const WordSpan original_span{pos, pos + spec.original_term.size(), spec.original_term, 0.0};
  const WordSpan replacement_span{pos, pos + spec.replacement_term.size(),
                                  spec.replacement_term, 0.0};

  const EncodedText target = bundle.text_encoder->encode_text(edited_caption);
  ImageTensor edited = bundle.inpainter->inpaint(image, region, target.embedding);
  const RegionBucket bucket = bucket_for_area(region.count());

  auto make = [&](PairType type, const std::string& img, const std::string& caption,
                  ImageSourceKind source) {
    DatasetRecord r;
    r.id = base.id + "/" + to_string(type);
    r.image_path = img;
    r.caption = caption;
    r.pair_type = type;
    r.label = label_for(type);
    r.source = source;
    return r;
  };
  GeneratedPairs out{{}, std::move(edited), edited_caption};
  out.records[0] = make(PairType::kOrigOrig, base.image_path, base.caption, base.source);
  out.records[1] = make(PairType::kEditEditText, edited_image_path, edited_caption,
                        ImageSourceKind::kGenerated);
  out.records[2] = make(PairType::kOrigEditText, base.image_path, edited_caption, base.source);
  out.records[3] = make(PairType::kEditOrigText, edited_image_path, base.caption,
                        ImageSourceKind::kGenerated);
  // Both inconsistent pairs disagree inside the edited region and on the
  // edited word.
  out.records[2].gt_mask_path = spec.region_mask_path;
  out.records[2].gt_spans = {replacement_span};
  out.records[2].region_bucket = bucket;
  out.records[3].gt_mask_path = spec.region_mask_path;
  out.records[3].gt_spans = {original_span};
  out.records[3].region_bucket = bucket;
  return out;
}

DatasetStats validate_stats(const std::vector<DatasetRecord>& records) {
  DatasetStats s;
  for (const auto& [v, name] : kLabels) s.by_label[name] = 0;
  for (const auto& [v, name] : kPairTypes) s.by_pair_type[name] = 0;
  for (const auto& [v, name] : kBuckets) s.by_region_bucket[name] = 0;
  for (const auto& [v, name] : kSources) s.by_source[name] = 0;
  for (const DatasetRecord& r : records) {
    ++s.total;
    ++s.by_label[to_string(r.label)];
    ++s.by_pair_type[to_string(r.pair_type)];
    ++s.by_region_bucket[to_string(r.region_bucket)];
    ++s.by_source[to_string(r.source)];
    if (label_for(r.pair_type) != r.label) ++s.label_mismatches;
    if (r.label == PairLabel::kInconsistent && !r.gt_mask_path && r.gt_spans.empty()) {
      ++s.missing_ground_truth;
    }
  }
  return s;
}

const ScoreGroup* ClipScoreTable::find(const std::string& name) const {
  for (const ScoreGroup& g : groups) {
    if (g.name == name) return &g;
  }
  return nullptr;
}

double clip_score(const ImageTensor& image, const std::string& caption,
                  const BackendBundle& bundle) {
  const auto v = bundle.image_encoder->encode_image(image);
  const auto t = bundle.text_encoder->encode_text(caption).embedding.mean_pooled();
  return 100.0 * cosine_similarity(v, t);
}

std::vector<std::size_t> seeded_derangement(std::size_t n, std::uint64_t seed) {
  if (n < 2) throw InvalidArgument("a derangement needs at least two elements");
  // Sattolo's algorithm yields a single n-cycle, which has no fixed point.
  std::vector<std::size_t> p(n);
  for (std::size_t i = 0; i < n; ++i) p[i] = i;
  Rng rng(seed);
  for (std::size_t i = n - 1; i > 0; --i) std::swap(p[i], p[rng.below(i)]);
  return p;
}

ClipScoreTable clip_score_table(const std::vector<DatasetRecord>& records,
                                const AssetStore& assets, const BackendBundle& bundle,
                                std::uint64_t seed) {
  if (records.empty()) throw InvalidArgument("clip score table needs records");
  ClipScoreTable table;
  std::vector<const DatasetRecord*> consistent;
  std::map<std::string, std::pair<double, std::size_t>> sums;
  std::map<std::string, ImageTensor> cache;
  auto image_of = [&](const std::string& path) -> const ImageTensor& {
    auto it = cache.find(path);
    if (it == cache.end()) it = cache.emplace(path, assets.image(path)).first;
    return it->second;
  };
  for (const DatasetRecord& r : records) {
    std::string group;
    if (r.label == PairLabel::kConsistent) {
      consistent.push_back(&r);
      group = r.source == ImageSourceKind::kReal ? "real_consistent" : "generated_consistent";
    } else {
      group = "generated_inconsistent";
    }
    auto& [sum, count] = sums[group];
    sum += clip_score(image_of(r.image_path), r.caption, bundle);
    ++count;
  }
  if (consistent.size() >= 2) {
    const auto perm = seeded_derangement(consistent.size(), seed);
    auto& [sum, count] = sums["random_swap"];
    for (std::size_t i = 0; i < consistent.size(); ++i) {
      sum += clip_score(image_of(consistent[i]->image_path), consistent[perm[i]]->caption, bundle);
      ++count;
    }
  }
  for (const char* name :
       {"real_consistent", "generated_consistent", "random_swap", "generated_inconsistent"}) {
    auto it = sums.find(name);
    if (it == sums.end()) {
      table.notes.push_back(std::string("group ") + name + " has no members");
      continue;
    }
    table.groups.push_back({name, it->second.first / static_cast<double>(it->second.second),
                            it->second.second});
  }
  return table;
}

}  // namespace tiil

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

#include <gtest/gtest.h>

#include <fstream>
#include <random>
#include <set>

#include "test_util.hpp"
#include "tiil/benchmark.hpp"
#include "tiil/dataset.hpp"
#include "tiil/error.hpp"
#include "tiil/synthetic_backend.hpp"

namespace tiil {
namespace {

using tiil::testing::TempDir;
using SB = SyntheticBackend;

const std::string kFixture = std::string(TIIL_FIXTURE_DIR) + "/mini_manifest.jsonl";

void write_file(const std::string& path, const std::string& text) {
  std::ofstream(path, std::ios::binary) << text;
}

DatasetRecord inconsistent_record() {
  DatasetRecord r;
  r.id = "b1/orig_editText";
  r.image_path = "images/b1.png";
  r.caption = "a café on the corner";
  r.pair_type = PairType::kOrigEditText;
  r.label = PairLabel::kInconsistent;
  r.gt_mask_path = "masks/b1.png";
  r.gt_spans = {WordSpan{2, 7, "café", 0.25}};
  r.region_bucket = RegionBucket::kSmall;
  return r;
}

TEST(EnumsTest, RoundTripAndUnknown) {
  for (auto t : {PairType::kOrigOrig, PairType::kEditEditText, PairType::kOrigEditText,
                 PairType::kEditOrigText}) {
    EXPECT_EQ(parse_pair_type(to_string(t)), t);
  }
  for (auto b : {RegionBucket::kLarge, RegionBucket::kMedium, RegionBucket::kSmall,
                 RegionBucket::kNone}) {
    EXPECT_EQ(parse_region_bucket(to_string(b)), b);
  }
  EXPECT_EQ(parse_image_source("generated"), ImageSourceKind::kGenerated);
  EXPECT_THROW(parse_pair_label("maybe"), DataError);
  EXPECT_THROW(parse_pair_type("orig"), DataError);
}

TEST(EnumsTest, PairTypeDeterminesLabel) {
  EXPECT_EQ(label_for(PairType::kOrigOrig), PairLabel::kConsistent);
  EXPECT_EQ(label_for(PairType::kEditEditText), PairLabel::kConsistent);
  EXPECT_EQ(label_for(PairType::kOrigEditText), PairLabel::kInconsistent);
  EXPECT_EQ(label_for(PairType::kEditOrigText), PairLabel::kInconsistent);
}

TEST(BucketTest, Boundaries) {
  EXPECT_EQ(bucket_for_area(0), RegionBucket::kNone);
  EXPECT_EQ(bucket_for_area(1), RegionBucket::kSmall);
  EXPECT_EQ(bucket_for_area(100 * 100 - 1), RegionBucket::kSmall);
  EXPECT_EQ(bucket_for_area(100 * 100), RegionBucket::kMedium);
  EXPECT_EQ(bucket_for_area(150 * 150), RegionBucket::kMedium);
  EXPECT_EQ(bucket_for_area(200 * 200), RegionBucket::kMedium);
  EXPECT_EQ(bucket_for_area(200 * 200 + 1), RegionBucket::kLarge);
}

TEST(RecordTest, Validation) {
  DatasetRecord r = inconsistent_record();
  EXPECT_EQ(validate_record(r), "");
  r.label = PairLabel::kConsistent;
  EXPECT_NE(validate_record(r), "");
  r = inconsistent_record();
  r.gt_mask_path.reset();
  EXPECT_EQ(validate_record(r), "");
  r.gt_spans.clear();
  EXPECT_NE(validate_record(r).find("without"), std::string::npos);
  r = inconsistent_record();
  r.gt_spans[0].char_end = 6;
  EXPECT_NE(validate_record(r).find("does not slice"), std::string::npos);
}

TEST(RecordTest, JsonRoundTripIsLossless) {
  const DatasetRecord r = inconsistent_record();
  EXPECT_EQ(record_from_json_line(record_to_json_line(r)), r);
  DatasetRecord c;
  c.id = "x";
  c.image_path = "/abs/x.png";
  c.caption = "quote \" and \\ slash";
  c.source = ImageSourceKind::kGenerated;
  EXPECT_EQ(record_from_json_line(record_to_json_line(c)), c);
  EXPECT_THROW(record_from_json_line("{"), DataError);
  EXPECT_THROW(record_from_json_line("[1]"), DataError);
  EXPECT_THROW(record_from_json_line(R"({"id":"x","caption":"c","pair_type":"orig_orig","label":"consistent"})"),
               DataError);
}

TEST(ManifestTest, RoundTripOfFixture) {
  const Manifest m = load_manifest(kFixture);
  ASSERT_TRUE(m.errors.empty());
  ASSERT_EQ(m.records.size(), 40u);
  TempDir dir("manifest");
  write_manifest(dir.str("copy.jsonl"), m.records);
  const Manifest again = load_manifest(dir.str("copy.jsonl"));
  EXPECT_EQ(again.records, m.records);
  EXPECT_EQ(again.base_dir, dir.path().string());
}

TEST(ManifestTest, EmptyBlankAndBadLines) {
  TempDir dir("manifest_bad");
  write_file(dir.str("empty.jsonl"), "");
  const Manifest empty = load_manifest(dir.str("empty.jsonl"));
  EXPECT_TRUE(empty.records.empty());
  EXPECT_TRUE(empty.errors.empty());
  EXPECT_EQ(validate_stats(empty.records).total, 0u);

  const DatasetRecord good = inconsistent_record();
  std::string bad = record_to_json_line(good);
  bad.replace(bad.find("\"inconsistent\""), 14, "\"unsure\"");
  write_file(dir.str("m.jsonl"), record_to_json_line(good) + "\n\n" + bad + "\n" +
                                     record_to_json_line(good) + "\r\n");
  const Manifest m = load_manifest(dir.str("m.jsonl"));
  EXPECT_EQ(m.records.size(), 1u);
  ASSERT_EQ(m.errors.size(), 2u);
  EXPECT_EQ(m.errors[0].line, 3u);
  EXPECT_NE(m.errors[0].message.find("unsure"), std::string::npos);
  EXPECT_EQ(m.errors[1].line, 4u);
  EXPECT_NE(m.errors[1].message.find("duplicate"), std::string::npos);

  EXPECT_THROW(load_manifest(dir.str("missing.jsonl")), DataError);
}

TEST(StatsTest, FixtureCountsExact) {
  const DatasetStats s = validate_stats(load_manifest(kFixture).records);
  EXPECT_EQ(s.total, 40u);
  EXPECT_EQ(s.by_label.at("consistent"), 20u);
  EXPECT_EQ(s.by_label.at("inconsistent"), 20u);
  for (const char* t : {"orig_orig", "edit_editText", "orig_editText", "edit_origText"}) {
    EXPECT_EQ(s.by_pair_type.at(t), 10u) << t;
  }
  EXPECT_EQ(s.by_region_bucket.at("large"), 8u);
  EXPECT_EQ(s.by_region_bucket.at("medium"), 6u);
  EXPECT_EQ(s.by_region_bucket.at("small"), 6u);
  EXPECT_EQ(s.by_region_bucket.at("none"), 20u);
  EXPECT_EQ(s.by_source.at("real"), 20u);
  EXPECT_EQ(s.by_source.at("generated"), 20u);
  EXPECT_EQ(s.label_mismatches, 0u);
  EXPECT_EQ(s.missing_ground_truth, 0u);
}

TEST(StatsTest, CountsProblemsWithoutThrowing) {
  DatasetRecord r = inconsistent_record();
  r.gt_mask_path.reset();
  r.gt_spans.clear();
  DatasetRecord w = inconsistent_record();
  w.label = PairLabel::kConsistent;
  const DatasetStats s = validate_stats({r, w});
  EXPECT_EQ(s.missing_ground_truth, 1u);
  EXPECT_EQ(s.label_mismatches, 1u);
}

class GeneratePairsTest : public ::testing::Test {
 protected:
  GeneratePairsTest() : bundle_(make_synthetic_backend()), sb_(as_synthetic(bundle_)) {
    base_.id = "b7";
    base_.image_path = "images/b7.png";
    base_.caption = "red fox with blue hat beside green tree";
    image_ = sb_->render(sb_->encode_text(base_.caption).embedding);
  }
  BackendBundle bundle_;
  std::shared_ptr<const SyntheticBackend> sb_;
  DatasetRecord base_;
  ImageTensor image_ = ImageTensor::filled(SB::image_shape(), 0.5);
};

TEST_F(GeneratePairsTest, TwoConsistentTwoInconsistent) {
  const EditSpec spec{"b7", "masks/b7.png", "hat", "cup"};
  const BinaryMask region = SB::strip_mask(4);
  const GeneratedPairs g = generate_pairs(base_, image_, region, spec, bundle_, "images/b7_e.png");
  EXPECT_EQ(g.edited_caption, "red fox with blue cup beside green tree");
  std::size_t consistent = 0, inconsistent = 0;
  std::set<std::string> ids;
  for (const DatasetRecord& r : g.records) {
    EXPECT_EQ(validate_record(r), "") << r.id;
    ids.insert(r.id);
    (r.label == PairLabel::kConsistent ? consistent : inconsistent)++;
    if (r.label == PairLabel::kInconsistent) {
      EXPECT_EQ(r.gt_mask_path, spec.region_mask_path);
      EXPECT_EQ(r.region_bucket, RegionBucket::kSmall);
      ASSERT_EQ(r.gt_spans.size(), 1u);
    }
  }
  EXPECT_EQ(consistent, 2u);
  EXPECT_EQ(inconsistent, 2u);
  EXPECT_EQ(ids.size(), 4u);
  EXPECT_EQ(g.records[2].gt_spans[0].surface, "cup");
  EXPECT_EQ(g.records[3].gt_spans[0].surface, "hat");
  EXPECT_EQ(g.records[1].image_path, "images/b7_e.png");
  EXPECT_EQ(g.records[1].source, ImageSourceKind::kGenerated);
  EXPECT_EQ(g.records[0].id, "b7/orig_orig");
  EXPECT_EQ(g.edited_image,
            sb_->inpaint(image_, region, sb_->encode_text(g.edited_caption).embedding));
}

TEST_F(GeneratePairsTest, WholeWordReplacementAndErrors) {
  base_.caption = "hatter hat and a hat";
  const GeneratedPairs g = generate_pairs(base_, image_, SB::strip_mask(0),
                                          {"b7", "m.png", "hat", "cap"}, bundle_, "e.png");
  EXPECT_EQ(g.edited_caption, "hatter cap and a hat");
  EXPECT_EQ(g.records[3].gt_spans[0].char_start, 7u);
  EXPECT_THROW(generate_pairs(base_, image_, SB::strip_mask(0), {"b7", "m", "hatt", "x"}, bundle_,
                              "e.png"),
               InvalidArgument);
  EXPECT_THROW(generate_pairs(base_, image_, SB::strip_mask(0), {"b7", "m", "hat", "hat"}, bundle_,
                              "e.png"),
               InvalidArgument);
  EXPECT_THROW(generate_pairs(base_, image_, BinaryMask(8, 8), {"b7", "m", "hat", "cap"}, bundle_,
                              "e.png"),
               InvalidArgument);
}

TEST(EditSpecTest, LoadList) {
  TempDir dir("edits");
  write_file(dir.str("e.json"),
             R"([{"base_record_id":"b1","region_mask_path":"m.png","original_term":"red","replacement_term":"blue"}])");
  const auto specs = load_edit_specs(dir.str("e.json"));
  ASSERT_EQ(specs.size(), 1u);
  EXPECT_EQ(specs[0].replacement_term, "blue");
  write_file(dir.str("bad.json"), R"([{"base_record_id":"b1"}])");
  EXPECT_THROW(load_edit_specs(dir.str("bad.json")), DataError);
  write_file(dir.str("obj.json"), R"({"a":1})");
  EXPECT_THROW(load_edit_specs(dir.str("obj.json")), DataError);
  EXPECT_THROW(load_edit_specs(dir.str("none.json")), DataError);
}

TEST(DerangementTest, NoFixedPoints) {
  for (std::size_t n = 2; n < 40; ++n) {
    const auto p = seeded_derangement(n, n * 31);
    std::vector<bool> seen(n, false);
    for (std::size_t i = 0; i < n; ++i) {
      EXPECT_NE(p[i], i);
      ASSERT_LT(p[i], n);
      EXPECT_FALSE(seen[p[i]]);
      seen[p[i]] = true;
    }
    EXPECT_EQ(seeded_derangement(n, n * 31), p);
  }
  EXPECT_THROW(seeded_derangement(1, 0), InvalidArgument);
}

class ClipTableTest : public ::testing::Test {
 protected:
  ClipTableTest() : bundle_(make_synthetic_backend()) {
    PlantedBenchmarkConfig cfg;
    cfg.n_bases = 8;
    bench_ = build_planted_benchmark(bundle_, cfg);
  }
  BackendBundle bundle_;
  PlantedBenchmark bench_;
};

TEST_F(ClipTableTest, RandomSwapBelowMatchedPairs) {
  const ClipScoreTable t = clip_score_table(bench_.records, bench_.assets, bundle_, 3);
  // Every benchmark image is rendered, so there is no real-image group.
  ASSERT_EQ(t.groups.size(), 3u);
  EXPECT_EQ(t.find("real_consistent"), nullptr);
  ASSERT_EQ(t.notes.size(), 1u);
  const ScoreGroup* gen = t.find("generated_consistent");
  const ScoreGroup* swap = t.find("random_swap");
  const ScoreGroup* inc = t.find("generated_inconsistent");
  ASSERT_TRUE(gen && swap && inc);
  EXPECT_EQ(gen->count, 16u);
  EXPECT_EQ(swap->count, 16u);
  EXPECT_EQ(inc->count, 16u);
  EXPECT_LT(swap->mean, gen->mean);
  EXPECT_LT(inc->mean, gen->mean);
}

TEST_F(ClipTableTest, DeterministicAndGroupwiseConsistent) {
  const ClipScoreTable a = clip_score_table(bench_.records, bench_.assets, bundle_, 3);
  const ClipScoreTable b = clip_score_table(bench_.records, bench_.assets, bundle_, 3);
  for (std::size_t i = 0; i < a.groups.size(); ++i) {
    EXPECT_EQ(a.groups[i].mean, b.groups[i].mean);
  }
  // Relabelling the source of identical pairs moves them between groups
  // without changing the means.
  std::vector<DatasetRecord> real_only;
  for (const auto& r : bench_.records) {
    if (r.pair_type == PairType::kOrigOrig) real_only.push_back(r);
  }
  for (auto& r : real_only) r.source = ImageSourceKind::kReal;
  std::vector<DatasetRecord> as_generated = real_only;
  for (auto& r : as_generated) r.source = ImageSourceKind::kGenerated;
  const ClipScoreTable x = clip_score_table(real_only, bench_.assets, bundle_, 1);
  const ClipScoreTable y = clip_score_table(as_generated, bench_.assets, bundle_, 1);
  EXPECT_EQ(x.find("real_consistent")->mean, y.find("generated_consistent")->mean);
  EXPECT_EQ(x.find("generated_consistent"), nullptr);
  EXPECT_FALSE(x.notes.empty());
}

TEST_F(ClipTableTest, ClipScoreUnclamped) {
  const auto& r = bench_.records.front();
  const ImageTensor img = bench_.assets.image(r.image_path);
  const auto sb = as_synthetic(bundle_);
  const double want =
      100.0 * cosine_similarity(sb->encode_image(img),
                                sb->encode_text(r.caption).embedding.mean_pooled());
  EXPECT_DOUBLE_EQ(clip_score(img, r.caption, bundle_), want);
}

}  // namespace
}  // namespace tiil

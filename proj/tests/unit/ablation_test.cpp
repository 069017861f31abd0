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

#include "tiil/ablation.hpp"
#include "tiil/benchmark.hpp"
#include "tiil/error.hpp"
#include "tiil/evaluation.hpp"
#include "tiil/synthetic_backend.hpp"

namespace tiil {
namespace {

TEST(AblationGridTest, FullGrid) {
  const AblationGrid g = AblationGrid::full();
  ASSERT_EQ(g.axes.size(), 3u);
  EXPECT_EQ(g.axes[0].first, "mask_stage");
  EXPECT_EQ(g.axes[1].second, (std::vector<std::string>{"default", "no_constraint", "random"}));
  EXPECT_EQ(g.axes[2].second, (std::vector<std::string>{"0.1", "0.2", "0.3", "0.4", "mean"}));
  EXPECT_NO_THROW(g.validate());
}

TEST(AblationGridTest, Parse) {
  const AblationGrid g = AblationGrid::parse("threshold=0.1,mean;init=default,random");
  ASSERT_EQ(g.axes.size(), 2u);
  EXPECT_EQ(g.axes[0].first, "threshold");
  EXPECT_EQ(g.axes[0].second, (std::vector<std::string>{"0.1", "mean"}));
  EXPECT_EQ(g.axes[1].second, (std::vector<std::string>{"default", "random"}));
  EXPECT_THROW(AblationGrid::parse("colour=red"), InvalidArgument);
  EXPECT_THROW(AblationGrid::parse("init=warm"), InvalidArgument);
  EXPECT_THROW(AblationGrid::parse("threshold=1.5"), InvalidArgument);
  EXPECT_THROW(AblationGrid::parse("threshold"), InvalidArgument);
  EXPECT_THROW(AblationGrid::parse(""), InvalidArgument);
}

class HarnessTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    bundle_ = new BackendBundle(make_synthetic_backend());
    PlantedBenchmarkConfig cfg;
    cfg.n_bases = 3;
    bench_ = new PlantedBenchmark(build_planted_benchmark(*bundle_, cfg));
  }
  static void TearDownTestSuite() {
    delete bench_;
    delete bundle_;
  }
  static BackendBundle* bundle_;
  static PlantedBenchmark* bench_;
};
BackendBundle* HarnessTest::bundle_ = nullptr;
PlantedBenchmark* HarnessTest::bench_ = nullptr;

TEST_F(HarnessTest, SingleStrategyGivesSingleRow) {
  EvaluationOptions opts;
  const AblationReport r = run_ablations(bench_->records, bench_->assets, *bundle_,
                                         AblationGrid::parse("threshold=mean"), opts);
  ASSERT_EQ(r.tables.size(), 1u);
  ASSERT_EQ(r.tables[0].rows.size(), 1u);
  EXPECT_EQ(r.tables[0].rows[0].strategy, "mean");
  EXPECT_EQ(r.tables[0].rows[0].pairs, 6u);
  EXPECT_EQ(r.record_ids.size(), 6u);
  EXPECT_EQ(r.backend_id, "synthetic:1234");

  // The default strategy reproduces the plain localization evaluation.
  const auto outcomes = analyze_records(bench_->records, bench_->assets, *bundle_, opts);
  const LocalizationReport loc = evaluate_localization(bench_->records, outcomes, bench_->assets);
  EXPECT_DOUBLE_EQ(r.tables[0].rows[0].miou, loc.miou);
}

TEST_F(HarnessTest, ReportIsDeterministic) {
  EvaluationOptions opts;
  opts.seed = 4;
  opts.workers = 3;
  const AblationGrid grid = AblationGrid::parse("mask_stage=intermediate,final;threshold=0.3");
  const AblationReport a = run_ablations(bench_->records, bench_->assets, *bundle_, grid, opts);
  opts.workers = 1;
  const AblationReport b = run_ablations(bench_->records, bench_->assets, *bundle_, grid, opts);
  ASSERT_EQ(a.tables.size(), b.tables.size());
  for (std::size_t t = 0; t < a.tables.size(); ++t) {
    ASSERT_EQ(a.tables[t].rows.size(), b.tables[t].rows.size());
    for (std::size_t i = 0; i < a.tables[t].rows.size(); ++i) {
      EXPECT_EQ(a.tables[t].rows[i].miou, b.tables[t].rows[i].miou);
    }
  }
  EXPECT_EQ(a.record_ids, b.record_ids);
  EXPECT_NE(a.find("mask_stage")->find("intermediate"), nullptr);
  EXPECT_EQ(a.find("init"), nullptr);
}

TEST_F(HarnessTest, LocalizationSkipsSpanOnlyRecords) {
  std::vector<DatasetRecord> records = bench_->records;
  for (auto& r : records) {
    if (r.label == PairLabel::kInconsistent && r.pair_type == PairType::kEditOrigText) {
      r.gt_mask_path.reset();
    }
  }
  const auto outcomes = analyze_records(records, bench_->assets, *bundle_, EvaluationOptions{});
  const LocalizationReport loc = evaluate_localization(records, outcomes, bench_->assets);
  EXPECT_EQ(loc.rows.size(), 3u);
  EXPECT_EQ(loc.skipped.size(), 3u);
  EXPECT_GE(loc.miou, 0.0);
  EXPECT_LE(loc.miou, 1.0);
}

TEST_F(HarnessTest, FailedRecordsAreReported) {
  std::vector<DatasetRecord> records = bench_->records;
  auto outcomes = analyze_records(records, bench_->assets, *bundle_, EvaluationOptions{});
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (records[i].label == PairLabel::kInconsistent) {
      outcomes[i].result.reset();
      outcomes[i].error = "boom";
      EXPECT_THROW(evaluate_localization(records, outcomes, bench_->assets), InvalidArgument);
      break;
    }
  }
}

TEST_F(HarnessTest, IdenticalScoresGiveHalfAuc) {
  DatasetRecord c = bench_->records[0];
  std::vector<DatasetRecord> records;
  for (int i = 0; i < 4; ++i) {
    DatasetRecord r = c;
    r.id = "r" + std::to_string(i);
    if (i % 2 == 1) {
      r.pair_type = PairType::kOrigEditText;
      r.label = PairLabel::kInconsistent;
      r.gt_spans = {WordSpan{0, r.caption.find(' '), r.caption.substr(0, r.caption.find(' ')), 0}};
    }
    records.push_back(r);
  }
  const DetectionSummary d = baseline_clip_detect(records, bench_->assets, *bundle_);
  EXPECT_DOUBLE_EQ(d.auc, 0.5);
  EXPECT_EQ(d.scores.size(), 4u);
  EXPECT_EQ(d.labels, (std::vector<bool>{true, false, true, false}));
}

TEST_F(HarnessTest, DetectionReportShapes) {
  const auto outcomes = analyze_records(bench_->records, bench_->assets, *bundle_, EvaluationOptions{});
  const DetectionReport d = evaluate_detection(bench_->records, outcomes, bench_->assets, *bundle_);
  EXPECT_EQ(d.pipeline.scores.size(), bench_->records.size());
  EXPECT_EQ(d.baseline.scores.size(), bench_->records.size());
  for (std::size_t i = 0; i < bench_->records.size(); ++i) {
    EXPECT_EQ(d.pipeline.scores[i], outcomes[i].result->score);
    EXPECT_EQ(d.pipeline.labels[i], bench_->records[i].label == PairLabel::kConsistent);
  }
  EXPECT_GE(d.pipeline.accuracy, 0.5);
}

}  // namespace
}  // namespace tiil

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

// tiil: command-line front end.
//
// Exit codes: 0 ok, 2 usage or invalid input, 3 backend, 4 data.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "tiil/ablation.hpp"
#include "tiil/backend.hpp"
#include "tiil/benchmark.hpp"
#include "tiil/dataset.hpp"
#include "tiil/error.hpp"
#include "tiil/evaluation.hpp"
#include "tiil/image_io.hpp"
#include "tiil/pipeline.hpp"
#include "tiil/report.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using tiil::PipelineConfig;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitBackend = 3;
constexpr int kExitData = 4;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CommonOptions {
  std::string backend = "synthetic";
  std::uint64_t seed = 0;
  std::string out;
  std::size_t workers = 0;
  std::size_t iterations = 500;
  std::size_t top_k = 1;
  std::string threshold = "mean";
  std::size_t n_noises = 10;
};

void add_common(CLI::App* cmd, CommonOptions& o, const std::string& default_out) {
  o.out = default_out;
  cmd->add_option("--backend", o.backend, "synthetic | diffusion:<model-id>")
      ->capture_default_str();
  cmd->add_option("--seed", o.seed, "global seed")->capture_default_str();
  cmd->add_option("--out", o.out, "output directory")->capture_default_str();
  cmd->add_option("--iterations", o.iterations, "alignment steps")->capture_default_str();
  cmd->add_option("--noises", o.n_noises, "noise draws per difference map")
      ->capture_default_str();
  cmd->add_option("--mask-threshold", o.threshold, "mean or a value in [0,1]")
      ->capture_default_str();
}

PipelineConfig pipeline_config(const CommonOptions& o) {
  PipelineConfig cfg;
  cfg.seed = o.seed;
  cfg.align.iterations = o.iterations;
  cfg.mask.n_noises = o.n_noises;
  cfg.mask.threshold = tiil::ThresholdStrategy::parse(o.threshold);
  cfg.top_k = o.top_k;
  cfg.align.validate();
  cfg.mask.validate();
  return cfg;
}

std::size_t worker_count(const CommonOptions& o) {
  if (o.workers > 0) return o.workers;
  return std::max(1u, std::thread::hardware_concurrency());
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw tiil::DataError("cannot write '" + path.string() + "'");
  out << j.dump(2) << '\n';
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw tiil::DataError("cannot create directory '" + dir + "': " + ec.message());
}

tiil::Manifest load_checked(const std::string& path) {
  if (!fs::exists(path)) throw UsageError("manifest '" + path + "' does not exist");
  tiil::Manifest m = tiil::load_manifest(path);
  if (!m.errors.empty()) {
    std::ostringstream msg;
    msg << m.errors.size() << " malformed manifest line(s) in " << path << ":";
    for (const auto& e : m.errors) msg << "\n  line " << e.line << ": " << e.message;
    throw tiil::DataError(msg.str());
  }
  return m;
}

tiil::ImageTensor overlay(const tiil::ImageTensor& image, const tiil::BinaryMask& mask) {
  std::vector<double> data(image.values().begin(), image.values().end());
  const std::size_t c = image.channels();
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (!mask.at_index(i)) continue;
    for (std::size_t k = 0; k < c; ++k) {
      const double red = k == 0 ? 1.0 : 0.0;
      data[i * c + k] = 0.6 * data[i * c + k] + 0.4 * red;
    }
  }
  return tiil::ImageTensor(image.shape(), std::move(data));
}

// ---- analyze ---------------------------------------------------------------

struct AnalyzeOptions {
  CommonOptions common;
  std::string image;
  std::string text;
};

int cmd_analyze(const AnalyzeOptions& o) {
  if (!fs::exists(o.image)) throw UsageError("image '" + o.image + "' does not exist");
  if (o.text.empty()) throw UsageError("--text must not be empty");
  const PipelineConfig cfg = pipeline_config(o.common);
  const tiil::BackendBundle bundle = tiil::make_backend(o.common.backend);
  const tiil::ImageTensor image = tiil::read_png_image(o.image);
  const tiil::AnalysisResult r = tiil::analyze(image, o.text, bundle, cfg);

  ensure_dir(o.common.out);
  const fs::path out(o.common.out);
  tiil::write_png_mask((out / "mask.png").string(), r.mask);
  tiil::write_png_mask((out / "mask_intermediate.png").string(), r.intermediate_mask());
  tiil::write_png_image((out / "edited.png").string(), r.edited_image());
  std::string words;
  for (const auto& w : r.words) words += (words.empty() ? "" : ", ") + w.surface;
  tiil::write_png_image((out / "overlay.png").string(), overlay(image, r.mask),
                        {{"detected_words", words}, {"score", std::to_string(r.score)}});
  write_json(out / "result.json",
             tiil::analysis_to_json(r, cfg, "mask.png", "edited.png", tiil::utc_timestamp()));

  for (const auto& w : r.metadata.warnings) std::cerr << "warning: " << w << '\n';
  std::printf("score %.2f\n", r.score);
  std::printf("mask pixels %zu\n", r.mask.count());
  std::printf("words %s\n", words.empty() ? "(none)" : words.c_str());
  return kExitOk;
}

// ---- evaluate --------------------------------------------------------------

struct EvaluateOptions {
  CommonOptions common;
  std::string manifest;
  std::string task = "localization";
};

int cmd_evaluate(const EvaluateOptions& o) {
  const PipelineConfig cfg = pipeline_config(o.common);
  const tiil::Manifest m = load_checked(o.manifest);
  if (m.records.empty()) throw tiil::DataError("manifest '" + o.manifest + "' has no records");
  const tiil::BackendBundle bundle = tiil::make_backend(o.common.backend);
  const tiil::FileAssetStore assets(m.base_dir);
  tiil::EvaluationOptions opts{cfg, o.common.seed, worker_count(o.common)};

  std::vector<tiil::DatasetRecord> records = m.records;
  if (o.task == "localization") {
    std::erase_if(records, [](const tiil::DatasetRecord& r) {
      return r.label != tiil::PairLabel::kInconsistent;
    });
    if (records.empty()) throw tiil::DataError("manifest has no inconsistent records");
  }
  const auto outcomes = tiil::analyze_records(records, assets, bundle, opts);
  for (const auto& oc : outcomes) {
    if (!oc.result) throw tiil::DataError("record " + oc.id + " failed: " + oc.error);
  }

  json value;
  if (o.task == "localization") {
    const auto rep = tiil::evaluate_localization(records, outcomes, assets);
    json rows = json::array();
    for (const auto& r : rep.rows) {
      rows.push_back({{"id", r.id},
                      {"miou", r.miou_final},
                      {"miou_intermediate", r.miou_intermediate},
                      {"score", r.score}});
    }
    value = {{"miou", rep.miou},
             {"miou_intermediate", rep.miou_intermediate},
             {"pairs", rep.rows.size()},
             {"skipped", rep.skipped},
             {"rows", rows}};
    std::printf("mIoU %.4f (intermediate %.4f) over %zu pairs\n", rep.miou,
                rep.miou_intermediate, rep.rows.size());
  } else {
    const auto rep = tiil::evaluate_detection(records, outcomes, assets, bundle);
    json rows = json::array();
    for (std::size_t i = 0; i < records.size(); ++i) {
      rows.push_back({{"id", records[i].id},
                      {"label", tiil::to_string(records[i].label)},
                      {"score", rep.pipeline.scores[i]},
                      {"baseline_score", rep.baseline.scores[i]}});
    }
    value = {{"auc", rep.pipeline.auc},
             {"accuracy", rep.pipeline.accuracy},
             {"threshold", rep.pipeline.threshold},
             {"baseline",
              {{"auc", rep.baseline.auc},
               {"accuracy", rep.baseline.accuracy},
               {"threshold", rep.baseline.threshold}}},
             {"rows", rows}};
    std::printf("AUC %.4f accuracy %.4f at threshold %.4f (baseline AUC %.4f accuracy %.4f)\n",
                rep.pipeline.auc, rep.pipeline.accuracy, rep.pipeline.threshold,
                rep.baseline.auc, rep.baseline.accuracy);
  }
  json config = tiil::to_json(cfg);
  config["manifest"] = o.manifest;
  config["records"] = records.size();
  ensure_dir(o.common.out);
  write_json(fs::path(o.common.out) / "metrics.json",
             tiil::metrics_report(o.task, value, config, o.common.seed, bundle.id,
                                  tiil::utc_timestamp()));
  return kExitOk;
}

// ---- ablate ----------------------------------------------------------------

struct AblateOptions {
  CommonOptions common;
  std::string manifest;
  std::string strategies;
  std::string grid;
};

int cmd_ablate(const AblateOptions& o) {
  if (!o.strategies.empty() && !o.grid.empty()) {
    throw UsageError("use either --strategies or --grid");
  }
  const tiil::AblationGrid grid =
      !o.grid.empty()         ? tiil::AblationGrid::parse(o.grid)
      : !o.strategies.empty() ? tiil::AblationGrid::parse("threshold=" + o.strategies)
                              : tiil::AblationGrid::full();
  const PipelineConfig cfg = pipeline_config(o.common);
  const tiil::Manifest m = load_checked(o.manifest);
  const tiil::BackendBundle bundle = tiil::make_backend(o.common.backend);
  const tiil::FileAssetStore assets(m.base_dir);
  const tiil::EvaluationOptions opts{cfg, o.common.seed, worker_count(o.common)};
  const tiil::AblationReport rep = tiil::run_ablations(m.records, assets, bundle, grid, opts);

  for (const auto& t : rep.tables) {
    std::printf("%s\n", t.axis.c_str());
    for (const auto& r : t.rows) std::printf("  %-14s %.4f\n", r.strategy.c_str(), r.miou);
  }
  json config = tiil::to_json(cfg);
  config["manifest"] = o.manifest;
  ensure_dir(o.common.out);
  write_json(fs::path(o.common.out) / "ablation.json",
             tiil::metrics_report("ablation", tiil::to_json(rep), config, o.common.seed,
                                  bundle.id, tiil::utc_timestamp()));
  return kExitOk;
}

// ---- dataset ---------------------------------------------------------------

struct DatasetOptions {
  std::string manifest;
  std::string edits;
  std::string out = ".";
  std::string backend = "synthetic";
  std::uint64_t seed = 0;
  std::size_t bases = 25;
  bool scores = false;
};

int cmd_dataset_stats(const DatasetOptions& o) {
  if (!fs::exists(o.manifest)) throw UsageError("manifest '" + o.manifest + "' does not exist");
  const tiil::Manifest m = tiil::load_manifest(o.manifest);
  const tiil::DatasetStats s = tiil::validate_stats(m.records);
  json j = tiil::to_json(s);
  json errors = json::array();
  for (const auto& e : m.errors) errors.push_back({{"line", e.line}, {"message", e.message}});
  j["manifest_errors"] = errors;
  if (o.scores && !m.records.empty()) {
    const tiil::BackendBundle bundle = tiil::make_backend(o.backend);
    const tiil::FileAssetStore assets(m.base_dir);
    j["clip_scores"] = tiil::to_json(tiil::clip_score_table(m.records, assets, bundle, o.seed));
  }
  ensure_dir(o.out);
  write_json(fs::path(o.out) / "stats.json", j);

  std::printf("records %zu (consistent %zu, inconsistent %zu)\n", s.total,
              s.by_label.at("consistent"), s.by_label.at("inconsistent"));
  for (const auto& [k, v] : s.by_pair_type) std::printf("  %-14s %zu\n", k.c_str(), v);
  for (const auto& [k, v] : s.by_region_bucket) std::printf("  bucket %-7s %zu\n", k.c_str(), v);
  for (const auto& e : m.errors) {
    std::fprintf(stderr, "line %zu: %s\n", e.line, e.message.c_str());
  }
  return m.errors.empty() ? kExitOk : kExitData;
}

int cmd_dataset_build(const DatasetOptions& o) {
  if (o.edits.empty()) throw UsageError("dataset build needs --edits");
  const tiil::Manifest m = load_checked(o.manifest);
  if (!fs::exists(o.edits)) throw UsageError("edits file '" + o.edits + "' does not exist");
  const auto specs = tiil::load_edit_specs(o.edits);
  const tiil::BackendBundle bundle = tiil::make_backend(o.backend);
  const tiil::FileAssetStore assets(m.base_dir);
  std::map<std::string, const tiil::DatasetRecord*> by_id;
  for (const auto& r : m.records) by_id[r.id] = &r;

  ensure_dir((fs::path(o.out) / "images").string());
  std::vector<tiil::DatasetRecord> out;
  for (const auto& spec : specs) {
    auto it = by_id.find(spec.base_record_id);
    if (it == by_id.end()) throw tiil::DataError("edit refers to unknown record " + spec.base_record_id);
    tiil::DatasetRecord base = *it->second;
    const tiil::ImageTensor image = assets.image(base.image_path);
    const tiil::BinaryMask region = assets.mask(spec.region_mask_path);
    // Paths in the output manifest are relative to the output directory.
    base.image_path = fs::absolute(tiil::resolve_path(m.base_dir, base.image_path)).string();
    tiil::EditSpec local = spec;
    local.region_mask_path =
        fs::absolute(tiil::resolve_path(m.base_dir, spec.region_mask_path)).string();
    std::string stem = base.id;
    std::replace(stem.begin(), stem.end(), '/', '_');
    const std::string edited_name = "images/" + stem + "_edit.png";
    auto pairs = tiil::generate_pairs(base, image, region, local, bundle, edited_name);
    tiil::write_png_image((fs::path(o.out) / edited_name).string(), pairs.edited_image);
    for (auto& r : pairs.records) out.push_back(std::move(r));
  }
  tiil::write_manifest((fs::path(o.out) / "manifest.jsonl").string(), out);
  std::printf("wrote %zu records to %s\n", out.size(), o.out.c_str());
  return kExitOk;
}

int cmd_dataset_synth(const DatasetOptions& o) {
  const tiil::BackendBundle bundle = tiil::make_backend(o.backend);
  tiil::PlantedBenchmarkConfig cfg;
  cfg.n_bases = o.bases;
  cfg.seed = o.seed;
  const tiil::PlantedBenchmark bench = tiil::build_planted_benchmark(bundle, cfg);
  tiil::write_benchmark(bench, o.out);
  std::printf("wrote %zu records to %s\n", bench.records.size(), o.out.c_str());
  return kExitOk;
}

int exit_code_for(const tiil::StageError& e) {
  switch (e.cause()) {
    case tiil::StageError::Cause::kInvalidArgument:
      return kExitUsage;
    case tiil::StageError::Cause::kBackend:
      return kExitBackend;
    default:
      return kExitData;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Text-image inconsistency localization"};
  app.require_subcommand(1);

  AnalyzeOptions analyze;
  analyze.common.out = "tiil_out";
  auto* a = app.add_subcommand("analyze", "analyze one image-text pair");
  a->add_option("--image", analyze.image, "input PNG")->required();
  a->add_option("--text", analyze.text, "caption")->required();
  a->add_option("--top-k", analyze.common.top_k, "number of word spans")->capture_default_str();
  add_common(a, analyze.common, "tiil_out");

  EvaluateOptions evaluate;
  auto* e = app.add_subcommand("evaluate", "localization or detection metrics over a manifest");
  e->add_option("--manifest", evaluate.manifest, "JSON-lines manifest")->required();
  e->add_option("--task", evaluate.task)
      ->check(CLI::IsMember({"localization", "detection"}))
      ->capture_default_str();
  e->add_option("--workers", evaluate.common.workers, "parallel pairs (0 = all cores)");
  add_common(e, evaluate.common, ".");

  AblateOptions ablate;
  auto* b = app.add_subcommand("ablate", "mask-stage, initialization and threshold ablations");
  b->add_option("--manifest", ablate.manifest, "JSON-lines manifest")->required();
  b->add_option("--strategies", ablate.strategies, "threshold strategies, e.g. 0.1,mean");
  b->add_option("--grid", ablate.grid, "e.g. 'init=default,random;threshold=0.2,mean'");
  b->add_option("--workers", ablate.common.workers, "parallel pairs (0 = all cores)");
  add_common(b, ablate.common, ".");

  DatasetOptions ds;
  auto* d = app.add_subcommand("dataset", "manifest tools");
  d->require_subcommand(1);
  auto* d_stats = d->add_subcommand("stats", "count records by label, pair type and bucket");
  d_stats->add_option("--manifest", ds.manifest)->required();
  d_stats->add_option("--out", ds.out)->capture_default_str();
  d_stats->add_flag("--scores", ds.scores, "also compute whole-image score groups");
  d_stats->add_option("--backend", ds.backend)->capture_default_str();
  d_stats->add_option("--seed", ds.seed, "seed of the random-swap permutation");
  auto* d_build = d->add_subcommand("build", "generate the four pair records per edit");
  d_build->add_option("--manifest", ds.manifest, "base records")->required();
  d_build->add_option("--edits", ds.edits, "JSON list of edits")->required();
  d_build->add_option("--out", ds.out)->capture_default_str();
  d_build->add_option("--backend", ds.backend)->capture_default_str();
  auto* d_synth = d->add_subcommand("synth", "write the planted synthetic benchmark");
  d_synth->add_option("--out", ds.out)->capture_default_str();
  d_synth->add_option("--bases", ds.bases, "base captions (4 records each)")
      ->capture_default_str();
  d_synth->add_option("--seed", ds.seed)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (a->parsed()) return cmd_analyze(analyze);
    if (e->parsed()) return cmd_evaluate(evaluate);
    if (b->parsed()) return cmd_ablate(ablate);
    if (d_stats->parsed()) return cmd_dataset_stats(ds);
    if (d_build->parsed()) return cmd_dataset_build(ds);
    if (d_synth->parsed()) return cmd_dataset_synth(ds);
  } catch (const UsageError& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kExitUsage;
  } catch (const tiil::StageError& err) {
    std::cerr << "error: " << err.what() << '\n';
    return exit_code_for(err);
  } catch (const tiil::InvalidArgument& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kExitUsage;
  } catch (const tiil::BackendError& err) {
    std::cerr << "backend error: " << err.what() << '\n';
    return kExitBackend;
  } catch (const tiil::DataError& err) {
    std::cerr << "data error: " << err.what() << '\n';
    return kExitData;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}

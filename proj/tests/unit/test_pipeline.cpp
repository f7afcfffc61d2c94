// Copyright 2026 The rissim Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "ris/error.hpp"
#include "ris/pipeline.hpp"
#include "ris/scenario.hpp"

using namespace ris;
namespace fs = std::filesystem;

namespace
{

// Coarse 1x1 pair that runs in about a second.
Scenario fast(const std::string &dir)
{
  auto s = parse_scenario(R"({
    "name": "fast",
    "mesh": {"fine_resolution_mm": 1.05, "coarse_resolution_mm": 2.5, "pml_cells": 6, "air_padding_mm": 5},
    "analysis": {"n_points": 81},
    "run": {"energy_stop_db": -30}
  })");
  s.output_dir = (fs::temp_directory_path() / "ris_pipeline_test" / dir).string();
  fs::remove_all(s.output_dir);
  return s;
}

std::string slurp(const fs::path &p)
{
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

TEST(Pipeline, ArtifactsAndManifest)
{
  const auto s = fast("artifacts");
  const auto a = run_scenario(s);
  ASSERT_TRUE(a.complete);
  ASSERT_TRUE(a.result);
  for (const char *f : {"scenario.json", "mesh_report.json", "scene.json", "s_matrix.s2p", "s_matrix.csv",
                        "impedance.csv", "powers.csv", "resonance.json", "timeseries_p0.csv", "manifest.json"})
    EXPECT_TRUE(fs::exists(fs::path(s.output_dir) / f)) << f;
  const auto m = nlohmann::json::parse(slurp(fs::path(s.output_dir) / "manifest.json"));
  EXPECT_EQ(m.at("complete"), true);
  EXPECT_EQ(m.at("config_hash"), config_hash(s));
  // the saved scenario reloads to the same configuration
  EXPECT_EQ(config_hash(load_scenario(fs::path(s.output_dir) / "scenario.json")), config_hash(s));
  // the resonance sits in the analysis band and the port is not a perfect match everywhere
  const auto &r = a.result->resonance.at(0);
  EXPECT_GT(r.frequency, 6e9);
  EXPECT_LT(r.frequency, 10e9);
  EXPECT_GT(a.result->fitness, 0.0);
}

TEST(Pipeline, DeterministicArtifactsAcrossRunsAndWorkers)
{
  auto s1 = fast("det1");
  auto s2 = fast("det2");
  s2.run.workers = 2;
  run_scenario(s1);
  run_scenario(s2);
  for (const char *f : {"s_matrix.s2p", "s_matrix.csv", "impedance.csv", "powers.csv", "resonance.json",
                        "timeseries_p0.csv", "scene.json", "mesh_report.json"})
  {
    const auto a = slurp(fs::path(s1.output_dir) / f);
    EXPECT_FALSE(a.empty()) << f;
    EXPECT_EQ(a, slurp(fs::path(s2.output_dir) / f)) << f;
  }
}

TEST(Pipeline, ZeroAmplitudeGivesWeakResonance)
{
  auto s = fast("zero");
  s.source.amplitude = 0.0;
  const auto a = run_scenario(s);
  ASSERT_TRUE(a.result);
  EXPECT_TRUE(a.result->resonance.at(0).weak);
  EXPECT_EQ(a.result->fitness, 0.0);
  EXPECT_EQ(a.result->s.measured.at(0), 2);
}

TEST(Pipeline, DryRunWritesReportOnly)
{
  RunOptions opt;
  opt.dry_run = true;
  const auto s = fast("dry");
  const auto a = run_scenario(s, opt);
  EXPECT_FALSE(a.result);
  EXPECT_TRUE(fs::exists(fs::path(s.output_dir) / "mesh_report.txt"));
  EXPECT_FALSE(fs::exists(fs::path(s.output_dir) / "s_matrix.s2p"));
  EXPECT_GT(a.cost.cells, 0u);
  EXPECT_GT(a.cost.steps, 0);
}

TEST(Pipeline, LargeArraysNeedOptIn)
{
  auto s = fast("large");
  s.pair.ris1.rows = s.pair.ris1.cols = s.pair.ris2.rows = s.pair.ris2.cols = 6;
  RunOptions opt;
  opt.dry_run = true;
  EXPECT_THROW(run_scenario(s, opt), ValidationError);
  opt.large = true;
  EXPECT_NO_THROW(run_scenario(s, opt));
}

TEST(Pipeline, SweepKeepsFailedRows)
{
  const auto s = fast("sweep");
  RunOptions opt;
  opt.dry_run = true;
  // 2 mm is closer than two substrate halves, so that geometry is invalid
  const auto rows = distance_sweep(s, {2.0, 10.0, 30.0}, opt);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_FALSE(rows[0].ok);
  EXPECT_FALSE(rows[0].error.empty());
  EXPECT_TRUE(rows[1].ok);
  EXPECT_TRUE(rows[2].ok);
  std::ostringstream os;
  write_sweep_csv(rows, os);
  int lines = 0;
  std::istringstream is(os.str());
  for (std::string l; std::getline(is, l);)
    ++lines;
  EXPECT_EQ(lines, 4);
  EXPECT_THROW(distance_sweep(s, {30.0, 10.0}, opt), ValidationError);
}

TEST(Pipeline, SweepRunsEachDistance)
{
  const auto s = fast("sweep_run");
  const auto rows = distance_sweep(s, {10.0, 40.0});
  ASSERT_EQ(rows.size(), 2u);
  ASSERT_TRUE(rows[0].ok && rows[1].ok);
  // coupling falls off with distance
  EXPECT_GT(rows[0].max_coupling, rows[1].max_coupling);
}

TEST(Pipeline, LumpedCandidateReuseMatchesRebuild)
{
  auto s = fast("cand");
  Parameterization p;
  p.entries.push_back({"c", ParamKind::LumpedC, 0, "", 0.1e-12, 5e-12, "F"});
  const auto model = prepare_model(s);
  const std::vector<double> x{0.7e-12};
  const double reused = evaluate_candidate(x, s, p, &model);
  // the same capacitor written into the scenario and rebuilt from scratch
  Scenario direct = s;
  direct.pair.ris1.cell.lumped_state.capacitance = 0.7e-12;
  const double rebuilt = evaluate_candidate({}, direct, Parameterization{});
  EXPECT_EQ(reused, rebuilt);
  EXPECT_NE(reused, evaluate_candidate({}, s, Parameterization{}));
}

TEST(Pipeline, CandidateOutsideBoundsRejected)
{
  const auto s = fast("bounds");
  Parameterization p;
  p.entries.push_back({"c", ParamKind::LumpedC, 0, "", 0.1e-12, 5e-12, "F"});
  EXPECT_THROW(evaluate_candidate({9e-12}, s, p), Error);
}

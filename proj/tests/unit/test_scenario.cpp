// Copyright 2026 The rissim Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "ris/error.hpp"
#include "ris/scenario.hpp"

using namespace ris;

namespace
{

bool mentions(const ValidationError &e, const std::string &needle)
{
  const auto &v = e.violations();
  return std::any_of(v.begin(), v.end(), [&](const std::string &m) { return m.find(needle) != std::string::npos; });
}

}  // namespace

TEST(Scenario, EmptyDocumentGivesDefaults)
{
  const auto s = parse_scenario("{}");
  EXPECT_EQ(s.pair.ris1.rows, 1);
  EXPECT_EQ(s.pair.ris2.role, PortRole::Passive);
  EXPECT_EQ(s.source.f0, 8e9);
  EXPECT_EQ(s.excitation_ports(), std::vector<int>{0});
  EXPECT_EQ(s.passive_ports(), std::vector<int>{1});
  // resolutions follow the wavelength rule: lambda at 9 GHz over 20 sqrt(eps_r), and over 15
  const double lambda = 299792458.0e3 / 9e9;
  EXPECT_NEAR(s.mesh.fine_resolution, lambda / (20.0 * std::sqrt(2.2)), 1e-9);
  EXPECT_NEAR(s.mesh.coarse_resolution, lambda / 15.0, 1e-9);
  EXPECT_NEAR(s.mesh.air_padding, 299792458.0e3 / 8e9 / 8.0, 1e-9);
}

TEST(Scenario, SpacingIsEdgeToEdge)
{
  const auto s = parse_scenario(R"({"pair": {"srr_spacing_mm": 10}})");
  EXPECT_DOUBLE_EQ(s.pair.ris1.pitch, 10.9 + 10.0);
  const auto t = parse_scenario(R"({"pair": {"pitch_mm": 25}})");
  EXPECT_DOUBLE_EQ(t.pair.ris1.pitch, 25.0);
  EXPECT_THROW(parse_scenario(R"({"pair": {"pitch_mm": 25, "srr_spacing_mm": 3}})"), ValidationError);
}

TEST(Scenario, UnknownKeyRejectedWithPath)
{
  try
  {
    parse_scenario(R"({"pair": {"cell": {"substrate": {"epsr_": 2.2}}}})");
    FAIL() << "accepted an unknown key";
  }
  catch (const ValidationError &e)
  {
    EXPECT_TRUE(mentions(e, "pair.cell.substrate.epsr_")) << e.what();
  }
}

TEST(Scenario, ReportsEveryProblem)
{
  try
  {
    parse_scenario(R"({"pair": {"rows": 0}, "source": {"f0_hz": -1}, "mesh": {"pml_cells": 2}})");
    FAIL();
  }
  catch (const ValidationError &e)
  {
    EXPECT_TRUE(mentions(e, "rows"));
    EXPECT_TRUE(mentions(e, "f0"));
    EXPECT_TRUE(mentions(e, "pml_cells"));
  }
}

TEST(Scenario, MalformedJsonHasPosition)
{
  try
  {
    parse_scenario("{\n  \"pair\": {\n    \"rows\": 3,,\n  }\n}");
    FAIL();
  }
  catch (const ValidationError &)
  {
    FAIL() << "syntax errors are not validation errors";
  }
  catch (const Error &e)
  {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
}

TEST(Scenario, WrongTypeIsValidationError)
{
  EXPECT_THROW(parse_scenario(R"({"pair": {"rows": "three"}})"), ValidationError);
  EXPECT_THROW(parse_scenario(R"({"schema": "something.else"})"), ValidationError);
}

TEST(Scenario, RoundTripIsFixedPoint)
{
  const auto s = parse_scenario(R"({
    "name": "rt",
    "pair": {"rows": 2, "cols": 3, "srr_spacing_mm": 4, "separation_mm": 30,
             "cell": {"srr": {"ring_separation_mm": 0.8}, "lumped_state": {"capacitance_f": 3e-13}}},
    "mesh": {"fine_resolution_mm": 0.5, "coarse_resolution_mm": 1.5},
    "run": {"active_ports": [0, 4], "max_timesteps": 5000},
    "analysis": {"n_points": 101, "fitness_frequency_hz": 8.5e9},
    "parameters": [{"name": "c", "kind": "lumped-C", "port": -1, "lower": 1e-13, "upper": 1e-12, "unit": "F"}],
    "optimizer": {"max_evaluations": 40, "seed": 3}
  })");
  const auto once = to_json(s);
  const auto back = scenario_from_json(once);
  EXPECT_EQ(back, s);
  EXPECT_EQ(to_json(back), once);
  EXPECT_EQ(s.excitation_ports(), (std::vector<int>{0, 4}));
  EXPECT_EQ(s.passive_ports().size(), 6u);
}

TEST(Scenario, HashTracksMeaningfulFields)
{
  const Scenario base = parse_scenario("{}");
  const auto h = config_hash(base);
  EXPECT_EQ(h.size(), 16u);
  Scenario renamed = base;
  renamed.name = "other";
  renamed.output_dir = "elsewhere";
  renamed.run.workers = 7;
  EXPECT_EQ(config_hash(renamed), h);
  EXPECT_NE(config_hash(with_field(base, "pair.separation_mm", 11.0)), h);
  EXPECT_NE(config_hash(with_field(base, "source.fc_hz", 2.5e9)), h);
  EXPECT_NE(config_hash(with_field(base, "mesh.fine_resolution_mm", 0.5)), h);
  EXPECT_NE(config_hash(with_field(base, "pair.cell.srr.ring_separation_mm", 0.9)), h);
  EXPECT_NE(config_hash(with_field(base, "run.cfl_factor", 0.9)), h);
  EXPECT_NE(config_hash(with_field(base, "analysis.n_points", 201)), h);
}

TEST(Scenario, WithFieldAddressesNumbersOnly)
{
  const Scenario base = parse_scenario("{}");
  EXPECT_DOUBLE_EQ(with_field(base, "pair.cell.substrate.eps_r", 3.0).pair.ris1.cell.substrate.eps_r, 3.0);
  EXPECT_THROW(with_field(base, "pair.cell.nope_mm", 1.0), Error);
  EXPECT_THROW(with_field(base, "name", 1.0), Error);
}

TEST(Scenario, GeometryParameterMustNameAKey)
{
  EXPECT_THROW(parse_scenario(R"({"parameters": [{"name": "g", "kind": "geometry",
      "field": "pair.cell.srr.ring_sep_mm", "lower": 0.5, "upper": 2}]})"),
               ValidationError);
  EXPECT_NO_THROW(parse_scenario(R"({"parameters": [{"name": "g", "kind": "geometry",
      "field": "pair.cell.srr.ring_separation_mm", "lower": 0.5, "upper": 2}]})"));
}

TEST(Scenario, LoadFromFile)
{
  const auto path = std::filesystem::temp_directory_path() / "ris_scenario_test.json";
  {
    std::ofstream(path) << R"({"name": "file", "pair": {"separation_mm": 20}})";
  }
  const auto s = load_scenario(path);
  EXPECT_EQ(s.name, "file");
  EXPECT_DOUBLE_EQ(s.pair.separation, 20.0);
  std::filesystem::remove(path);
  EXPECT_THROW(load_scenario(path), Error);
}

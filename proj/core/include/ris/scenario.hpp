// Copyright 2026 The rissim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ris/mesh.hpp"
#include "ris/optim.hpp"
#include "ris/rf.hpp"
#include "ris/scene.hpp"
#include "ris/simulation.hpp"
#include "ris/source.hpp"

namespace ris
{

struct AnalysisSpec
{
  FrequencyGrid grid;
  double z0 = 50.0;
  double threshold_db = -10.0;
  std::optional<double> fitness_frequency;  // Hz, defaults to the source centre frequency

  friend bool operator==(const AnalysisSpec &, const AnalysisSpec &) = default;
};

/// Everything one invocation needs. Both RIS share the array description; RIS2 is passive.
struct Scenario
{
  std::string name = "scenario";
  PairSpec pair;
  SourceSpec source;
  MeshSpec mesh;
  RunConfig run;
  AnalysisSpec analysis;
  std::vector<int> active_ports;  // empty = every RIS1 port
  std::optional<Parameterization> parameters;
  std::optional<OptimizerConfig> optimizer;
  std::string output_dir = "rissim-out";

  double fitness_frequency() const { return analysis.fitness_frequency.value_or(source.f0); }
  /// Ports excited one at a time, ascending.
  std::vector<int> excitation_ports() const;
  std::vector<int> passive_ports() const;

  friend bool operator==(const Scenario &, const Scenario &) = default;
};

std::vector<std::string> validate(const Scenario &s);

/// Parses and validates; unknown keys are errors. Throws ValidationError (listing every
/// problem) or Error for malformed JSON, with line and column.
Scenario scenario_from_json(const nlohmann::json &j);
Scenario parse_scenario(const std::string &text);
Scenario load_scenario(const std::filesystem::path &path);

nlohmann::json to_json(const Scenario &s);

/// Hash of every field that changes results (name and output directory excluded), hex.
std::string config_hash(const Scenario &s);

/// Sets a scenario value addressed by a dotted key path, e.g. "pair.cell.srr.ring_separation_mm".
Scenario with_field(const Scenario &s, const std::string &path, double value);

}  // namespace ris

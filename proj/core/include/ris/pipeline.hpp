// Copyright 2026 The rissim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ris/material_grid.hpp"
#include "ris/mesh.hpp"
#include "ris/optim.hpp"
#include "ris/rf.hpp"
#include "ris/scenario.hpp"
#include "ris/scene.hpp"
#include "ris/simulation.hpp"

namespace ris
{

using LogFn = std::function<void(const std::string &)>;

struct PreparedModel
{
  Scene scene;
  Mesh mesh;
  MaterialGrid grid;
};

PreparedModel prepare_model(const Scenario &s);

struct CostEstimate
{
  std::size_t cells = 0;
  double dt = 0.0;      // s
  long steps = 0;       // per excitation run, rough
  int runs = 0;
  double seconds = 0.0;  // at the nominal throughput below
  double memory_bytes = 0.0;
  static constexpr double kNominalCellsPerSecond = 5e7;

  nlohmann::json to_json() const;
};

CostEstimate estimate_cost(const Scenario &s, const PreparedModel &m);

/// Results of the per-active-port protocol on one model.
struct PairResult
{
  SParamMatrix s;
  std::vector<int> active, passive;
  std::vector<PortSpectra> spectra;      // per active port
  std::vector<SimRecord> records;        // per active port, empty unless kept
  std::vector<ResonanceReport> resonance;
  std::vector<Impedance> impedance;
  std::vector<PowerReport> powers;
  std::vector<nlohmann::json> run_log;   // steps, dt, stop reason, timings
  bool diverged = false;
  std::vector<std::string> diagnostics;
  double fitness = 0.0;                  // default power-transfer fitness
};

PairResult simulate(const Scenario &s, const PreparedModel &m, const LogFn &log = {},
                    bool keep_records = true);

struct RunOptions
{
  bool dry_run = false;
  bool large = false;  // required for arrays above 5x5
  LogFn log;
};

struct ArtifactSet
{
  std::filesystem::path dir;
  std::vector<std::string> files;
  bool complete = false;
  nlohmann::json manifest;
  std::optional<PairResult> result;
  std::optional<OptResult> optimization;
  CostEstimate cost;
};

/// build, mesh, rasterize, one run per active port, analysis and artifacts. With a
/// parameterization the optimizer runs afterwards and its history is written too.
ArtifactSet run_scenario(const Scenario &s, const RunOptions &opt = {});

/// Lumped values addressed by a candidate, applied to a rasterized grid.
void apply_lumped(MaterialGrid &grid, const Parameterization &p, const std::vector<double> &x);
/// Geometry values addressed by a candidate, applied to the scenario.
Scenario apply_geometry(const Scenario &s, const Parameterization &p, const std::vector<double> &x);

/// Fitness of one candidate. Lumped-only parameterizations reuse `reuse` when given; geometry
/// entries force a rebuild. Diverged runs give -infinity.
double evaluate_candidate(const std::vector<double> &x, const Scenario &s, const Parameterization &p,
                          const PreparedModel *reuse = nullptr, std::string *diagnostic = nullptr);

OptResult run_optimization(const Scenario &s, const LogFn &log = {});

struct SweepRow
{
  double distance = 0.0;  // mm
  bool ok = false;
  std::string error;
  double resonance_hz = 0.0;
  double max_coupling = 0.0;  // linear |S|
  double max_coupling_hz = 0.0;
  double transferred_power = 0.0;  // sum of |S_ij|^2 at the fitness frequency
};

std::vector<SweepRow> distance_sweep(const Scenario &s, const std::vector<double> &distances,
                                     const RunOptions &opt = {});
void write_sweep_csv(const std::vector<SweepRow> &rows, std::ostream &os);

}  // namespace ris

// Copyright 2026 The rissim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ris/rf.hpp"
#include "ris/scene.hpp"
#include "ris/simulation.hpp"

namespace ris
{

//
// Small reference setups whose answers are known in closed form. They are shared by the
// built-in validation suite, the acceptance harness and the tests; the expected values are
// computed by the callers.
//

/// Port and load stacked on one edge line in a tiny perfect-conductor box. The loop is so
/// small that the port sees the load impedance.
struct LumpedSandbox
{
  FrequencyGrid grid;
  Impedance impedance;
  std::vector<complex> s11;
  PowerReport powers;
  SimRecord record;
};

LumpedSandbox run_lumped_sandbox(const SeriesRlc &load, const FrequencyGrid &grid, int workers = 0);

/// Dipole port in open space with two probes 60 mm and 90 mm away broadside. Returns the
/// arrival delay between the probes from the envelope peaks.
struct PropagationResult
{
  double delay = 0.0;  // s
  double dt = 0.0;
  double distance = 0.030;  // m between the probes
  double wall_seconds = 0.0;
};

PropagationResult run_free_space(bool absorber = true);

/// Closed perfect-conductor cube with a weak current source; the energy trace after the source
/// has switched off.
struct EnergyResult
{
  std::vector<double> energy;  // from source extinction on
  double dt = 0.0;
  double wall_seconds = 0.0;
};

EnergyResult run_closed_box(double tan_delta, long steps_after_extinction = 1000);

/// Two dipole ports in an absorbing box, both excited in turn. Full 2x2 S-matrix.
SParamMatrix run_two_dipoles(const FrequencyGrid &grid);

struct CheckResult
{
  std::string name;
  bool passed = false;
  double measured = 0.0;
  double expected = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

struct PlatformOptions
{
  bool disable_pml = false;  // fault injection: the free-space check must then fail
};

/// Runs the oracle suite and returns its JSON report (schema "ris.validation").
nlohmann::json validate_platform(const PlatformOptions &opt = {});

nlohmann::json to_json(const CheckResult &c);

}  // namespace ris

// Copyright 2026 The rissim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "ris/material_grid.hpp"
#include "ris/mesh.hpp"
#include "ris/source.hpp"

namespace ris
{

struct RunConfig
{
  double cfl_factor = 0.95;
  long max_timesteps = 200000;
  double energy_stop_db = -40.0;
  std::vector<int> record_ports;  // empty = every port
  int workers = 0;                // 0 = runtime default
  double pml_reflection = 1e-4;
  int pml_grading_order = 3;
  bool disable_pml = false;       // debug only: absorber replaced by the PEC wall

  friend bool operator==(const RunConfig &, const RunConfig &) = default;
};

std::vector<std::string> validate(const RunConfig &cfg);

enum class StopReason
{
  Converged,
  StepLimit,
  Diverged
};

const char *to_string(StopReason r) noexcept;

/// Port and probe time series of one run. Samples k of voltage/current belong to time
/// (k + offset) * dt; both offsets are 0.5 because the lumped-element update is centred
/// between field steps.
struct SimRecord
{
  double dt = 0.0;
  long steps = 0;
  StopReason stop_reason = StopReason::StepLimit;
  double voltage_offset = 0.5;
  double current_offset = 0.5;
  int active_port = -1;
  double source_f0 = 0.0;

  std::vector<int> port_indices;
  std::vector<std::vector<double>> voltage;  // [port][step], V
  std::vector<std::vector<double>> current;  // [port][step], A, flowing into the structure
  std::vector<std::string> probe_labels;
  std::vector<std::vector<double>> probe_voltage;
  std::vector<double> energy;  // J, every step

  double wall_seconds = 0.0;
  double cells_per_second = 0.0;

  double duration() const noexcept { return dt * static_cast<double>(steps); }
  /// Position of `port_index` in the recorded arrays, or -1.
  int slot_of(int port_index) const noexcept;
};

/// Largest stable step: cfl * min over cells of 1 / (c_local sqrt(1/dx^2 + 1/dy^2 + 1/dz^2)).
double stable_timestep(const Mesh &mesh, const MaterialGrid &grid, double cfl_factor);

/// Leap-frog Yee update with lossy dielectrics, perfect conductors, CPML absorbers and
/// trapezoidal lumped R-L-C/port circuits. `active_port` drives the Gaussian source through its
/// internal resistance; every other port is terminated in its resistance.
SimRecord run_simulation(const MaterialGrid &grid, const Mesh &mesh, int active_port,
                         const SourceSpec &src, const RunConfig &cfg);

void write_csv(const SimRecord &rec, std::ostream &os);
void write_binary(const SimRecord &rec, std::ostream &os);
SimRecord read_binary(std::istream &is);

}  // namespace ris

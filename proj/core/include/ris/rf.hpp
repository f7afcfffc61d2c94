// Copyright 2026 The rissim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ris/simulation.hpp"

namespace ris
{

using complex = std::complex<double>;

struct FrequencyGrid
{
  double f_start = 6e9;  // Hz
  double f_stop = 10e9;  // Hz
  int n_points = 401;

  double at(std::size_t i) const noexcept;
  double step() const noexcept { return (f_stop - f_start) / (n_points - 1); }
  std::vector<double> values() const;

  friend bool operator==(const FrequencyGrid &, const FrequencyGrid &) = default;
};

std::vector<std::string> validate(const FrequencyGrid &grid);

/// sum_n x[n] exp(-j 2 pi f (n + offset) dt) dt at every grid frequency.
std::vector<complex> dtft(std::span<const double> x, double dt, double offset,
                          const FrequencyGrid &grid);

struct PortSpectra
{
  FrequencyGrid grid;
  int active_port = -1;
  std::vector<int> port_indices;
  std::vector<std::vector<complex>> voltage;  // [slot][f]
  std::vector<std::vector<complex>> current;  // [slot][f], into the structure
  int slot_of(int port_index) const noexcept;
};

/// Throws Error when the record is shorter than one period of the source frequency.
PortSpectra port_spectra(const SimRecord &rec, const FrequencyGrid &grid);

struct Impedance
{
  std::vector<complex> z;            // ohm
  std::vector<std::uint8_t> defined;  // 0 where |I| is below the numerical floor
};

Impedance feed_impedance(const PortSpectra &spectra, int port_index);

/// S[i][j](f) for ports 0..n-1. Columns without a run are zero and flagged unmeasured.
struct SParamMatrix
{
  FrequencyGrid grid;
  double z0 = 50.0;
  int n_ports = 0;
  std::vector<complex> data;             // (i * n + j) * n_points + f
  std::vector<std::uint8_t> measured;    // per column j: 0 no run, 1 measured, 2 run without excitation

  complex at(int i, int j, std::size_t f) const
  {
    return data[(static_cast<std::size_t>(i) * n_ports + j) * grid.n_points + f];
  }
  complex &at(int i, int j, std::size_t f)
  {
    return data[(static_cast<std::size_t>(i) * n_ports + j) * grid.n_points + f];
  }
  std::vector<double> magnitude_db(int i, int j) const;
};

/// a_j = (V_j + Z0 I_j) / (2 sqrt Z0), b_i = (V_i - Z0 I_i) / (2 sqrt Z0), S_ij = b_i / a_j using
/// the run that excites j. Throws Error on mismatched grids or duplicate runs.
SParamMatrix scattering_matrix(const std::vector<PortSpectra> &runs, int n_ports, double z0 = 50.0);

struct PowerReport
{
  FrequencyGrid grid;
  int active_port = -1;
  std::vector<int> port_indices;
  std::vector<std::vector<double>> incoming, reflected, accepted;  // [slot][f]

  nlohmann::json to_json() const;
};

PowerReport port_powers(const PortSpectra &spectra, double z0 = 50.0);

struct Band
{
  double f_lo = 0.0, f_hi = 0.0;
  double width() const noexcept { return f_hi - f_lo; }
};

struct ResonanceReport
{
  int port = 0;
  double frequency = 0.0;  // Hz
  double min_db = 0.0;
  double bandwidth = 0.0;  // Hz, band containing the minimum
  double threshold_db = -10.0;
  std::vector<Band> bands;  // every sub-threshold band
  bool weak = false;

  nlohmann::json to_json() const;
};

/// Vertex of the parabola through (-1, y0), (0, y1), (1, y2): offset in [-1, 1] and value.
std::pair<double, double> parabolic_vertex(double y0, double y1, double y2) noexcept;

ResonanceReport find_resonance(const SParamMatrix &s, int port, double threshold_db = -10.0);
ResonanceReport find_resonance(std::span<const double> db, const FrequencyGrid &grid,
                               double threshold_db = -10.0);

struct CouplingPeak
{
  double frequency = 0.0;
  double magnitude = 0.0;  // linear
  bool no_coupling = false;
};

CouplingPeak find_max_coupling(const SParamMatrix &s, int src, int dst);

/// Magnitude of the analytic signal of x.
std::vector<double> envelope(std::span<const double> x);

/// Index plus parabolic refinement of the largest sample.
double peak_position(std::span<const double> x);

void write_touchstone(const SParamMatrix &s, std::ostream &os);
void write_sparam_csv(const SParamMatrix &s, std::ostream &os);
void write_impedance_csv(const FrequencyGrid &grid, int port, const Impedance &z, std::ostream &os);
void write_power_csv(const PowerReport &p, std::ostream &os);

}  // namespace ris

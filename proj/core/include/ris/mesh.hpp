// Copyright 2026 The rissim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ris/geometry.hpp"
#include "ris/scene.hpp"

namespace ris
{

/// Dual-resolution rectilinear meshing rules. Lengths in millimetres.
struct MeshSpec
{
  double fine_resolution = 0.35;    // near metal and lumped elements
  double coarse_resolution = 1.5;   // surrounding air
  std::optional<double> merge_threshold;  // defaults to fine_resolution / 2
  int pml_cells = 8;
  double air_padding = 37.474 / 8.0;  // air between scene and absorber, >= lambda0/8
  bool edge_refinement = true;
  double max_grading = 2.0;

  double threshold() const noexcept { return merge_threshold.value_or(0.5 * fine_resolution); }

  /// Rule-of-thumb resolutions for a Gaussian excitation (f0, fc) in a medium of eps_r_max.
  static MeshSpec defaults_for(double f0_hz, double fc_hz, double eps_r_max);

  friend bool operator==(const MeshSpec &, const MeshSpec &) = default;
};

std::vector<std::string> validate(const MeshSpec &spec);

struct Mesh
{
  std::array<std::vector<double>, 3> lines;          // strictly increasing, mm
  std::array<std::vector<std::uint8_t>, 3> fixed;    // 1 where a scene line was preserved
  int pml_cells = 0;                                 // absorber cells on every boundary face
  double merge_threshold = 0.0;

  std::size_t line_count(std::size_t axis) const noexcept { return lines[axis].size(); }
  std::size_t cell_count() const noexcept;
  Box domain() const noexcept;

  /// Uniform mesh helper for sandboxes and tests.
  static Mesh uniform(const Box &box, double spacing, int pml_cells = 0);

  friend bool operator==(const Mesh &, const Mesh &) = default;
};

/// Removes non-fixed lines that sit closer than `threshold` to their surviving neighbour. Fixed
/// lines are never removed; a sub-threshold pair of two fixed lines is kept as is.
std::vector<double> smooth_lines(std::span<const double> lines,
                                 std::span<const std::uint8_t> fixed, double threshold);

/// Target cell size over an interval of one axis.
struct ResolutionRegion
{
  double lo, hi;      // zero-length regions refine the intervals touching them
  double resolution;
};

/// One-axis meshing core: fixed lines in, graded and smoothed lines out. No padding or PML.
std::vector<double> mesh_axis(std::span<const double> fixed_lines,
                              std::span<const ResolutionRegion> regions,
                              std::span<const double> refinement_lines, const MeshSpec &spec);

/// Builds the full mesh: scene lines, edge refinement, dual-resolution fill, grading, air
/// padding and absorber cells. Throws ValidationError on a degenerate bounding box.
Mesh generate_mesh(const Scene &scene, const MeshSpec &spec);

struct MeshReport
{
  struct AxisStats
  {
    std::size_t lines = 0;
    double min_spacing = 0.0, max_spacing = 0.0;
    double max_grading = 1.0;
    double max_grading_at = 0.0;  // coordinate of the line between the offending cells
  };
  struct SubThresholdPair
  {
    Axis axis;
    double a, b;
  };
  struct GradingViolation
  {
    Axis axis;
    double at;
    double ratio;
  };

  std::size_t cells = 0;
  std::array<AxisStats, 3> axes;
  double max_grading = 1.0;
  double grading_bound = 2.0;
  std::vector<GradingViolation> grading_violations;
  std::vector<SubThresholdPair> sub_threshold_fixed_pairs;
  double estimated_dt = 0.0;          // vacuum, CFL factor 0.95
  double estimated_memory_bytes = 0.0;

  std::string to_table() const;
  nlohmann::json to_json() const;
};

MeshReport mesh_report(const Mesh &mesh, double grading_bound = 2.0);

nlohmann::json to_json(const Mesh &mesh);
Mesh mesh_from_json(const nlohmann::json &j);

}  // namespace ris

// Copyright 2026 The rissim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "ris/geometry.hpp"
#include "ris/mesh.hpp"
#include "ris/scene.hpp"

namespace ris
{

/// Node counts of the Yee grid. Every field component is stored in an nx*ny*nz array; entries
/// beyond a component's valid range are never touched.
struct GridDims
{
  std::size_t nx = 0, ny = 0, nz = 0;

  std::size_t size() const noexcept { return nx * ny * nz; }
  std::size_t index(std::size_t i, std::size_t j, std::size_t k) const noexcept
  {
    return (i * ny + j) * nz + k;
  }
  std::size_t count(std::size_t axis) const noexcept
  {
    return axis == 0 ? nx : (axis == 1 ? ny : nz);
  }
};

struct EdgeMaterial
{
  double eps = 0.0;    // F/m
  double sigma = 0.0;  // S/m
  bool pec = false;
  friend bool operator==(const EdgeMaterial &, const EdgeMaterial &) = default;
};

/// One Yee edge carrying (part of) a lumped element.
struct LumpedEdge
{
  std::size_t component;  // field component = edge direction
  std::size_t i, j, k;
  double length;     // m
  double dual_area;  // m^2
};

/// A lumped item attached to a straight run of series edges.
struct LumpedElement
{
  std::string label;
  LumpedKind kind = LumpedKind::Port;
  int port_index = -1;
  PortRole role = PortRole::Passive;
  double port_resistance = 50.0;
  SeriesRlc series;
  std::vector<LumpedEdge> edges;
  double total_length = 0.0;  // m
};

/// Per-edge material assignment on the Yee grid plus attached lumped elements.
struct MaterialGrid
{
  GridDims dims;
  std::array<std::vector<double>, 3> nodes;          // mesh lines, metres
  std::array<std::vector<std::uint16_t>, 3> edge_material;  // index into `materials`
  std::vector<EdgeMaterial> materials;
  std::vector<LumpedElement> lumped;
  double f0 = 0.0;  // Hz, reference frequency of the loss-tangent mapping

  const EdgeMaterial &at(Axis component, std::size_t i, std::size_t j, std::size_t k) const
  {
    return materials[edge_material[index(component)][dims.index(i, j, k)]];
  }
  double eps(Axis c, std::size_t i, std::size_t j, std::size_t k) const { return at(c, i, j, k).eps; }
  double sigma(Axis c, std::size_t i, std::size_t j, std::size_t k) const { return at(c, i, j, k).sigma; }
  bool is_pec(Axis c, std::size_t i, std::size_t j, std::size_t k) const { return at(c, i, j, k).pec; }

  /// Edges of a component that belong to the grid (excludes the padding slots).
  bool valid_edge(Axis c, std::size_t i, std::size_t j, std::size_t k) const noexcept;
  std::size_t pec_edge_count() const;
  std::size_t port_count() const;
};

/// Conductivity equivalent of a loss tangent at frequency f.
double loss_tangent_conductivity(double eps_r, double tan_delta, double f_hz) noexcept;

/// Assigns materials to Yee edges. Conductors claim an edge when the highest-priority primitive
/// containing the edge midpoint is a conductor; permittivity and conductivity are the
/// area-weighted mean of the four cells sharing the edge. Domain-boundary tangential edges are
/// perfect conductors. Throws Error when a lumped item does not sit on mesh lines.
MaterialGrid rasterize(const Scene &scene, const Mesh &mesh, double f0_hz);

}  // namespace ris

// Copyright 2026 The rissim Authors
// SPDX-License-Identifier: Apache-2.0

#include "ris/material_grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <unordered_set>
#include <utility>

#include "ris/constants.hpp"
#include "ris/error.hpp"

namespace ris
{

namespace
{

constexpr double kLineTol = 1e-6;  // mm

// Index range [first, last) of sorted `pts` lying within [lo, hi].
std::pair<std::size_t, std::size_t> covered(const std::vector<double> &pts, double lo, double hi)
{
  const auto first = std::lower_bound(pts.begin(), pts.end(), lo - 1e-9);
  const auto last = std::upper_bound(pts.begin(), pts.end(), hi + 1e-9);
  return {static_cast<std::size_t>(first - pts.begin()),
          static_cast<std::size_t>(std::max(first, last) - pts.begin())};
}

std::size_t line_index(const std::vector<double> &lines, double v, const std::string &label)
{
  const auto it = std::lower_bound(lines.begin(), lines.end(), v - kLineTol);
  if (it == lines.end() || std::abs(*it - v) > kLineTol)
  {
    throw Error("lumped item '" + label + "' is not aligned with mesh lines");
  }
  return static_cast<std::size_t>(it - lines.begin());
}

class MaterialTable
{
public:
  std::uint16_t id(const EdgeMaterial &m)
  {
    const auto key = std::make_tuple(m.pec, m.eps, m.sigma);
    const auto it = ids_.find(key);
    if (it != ids_.end())
      return it->second;
    if (table_.size() >= std::numeric_limits<std::uint16_t>::max())
    {
      throw Error("rasterize: too many distinct edge materials");
    }
    const auto n = static_cast<std::uint16_t>(table_.size());
    table_.push_back(m);
    ids_.emplace(key, n);
    return n;
  }
  std::vector<EdgeMaterial> release() { return std::move(table_); }

private:
  std::map<std::tuple<bool, double, double>, std::uint16_t> ids_;
  std::vector<EdgeMaterial> table_;
};

}  // namespace

double loss_tangent_conductivity(double eps_r, double tan_delta, double f_hz) noexcept
{
  return 2.0 * constants::pi * f_hz * constants::eps0 * eps_r * tan_delta;
}

bool MaterialGrid::valid_edge(Axis c, std::size_t i, std::size_t j, std::size_t k) const noexcept
{
  const std::array<std::size_t, 3> n{dims.nx, dims.ny, dims.nz};
  const std::array<std::size_t, 3> p{i, j, k};
  for (std::size_t a = 0; a < 3; ++a)
  {
    const std::size_t limit = (a == index(c)) ? n[a] - 1 : n[a];
    if (p[a] >= limit)
      return false;
  }
  return true;
}

std::size_t MaterialGrid::pec_edge_count() const
{
  std::size_t count = 0;
  for (std::size_t c = 0; c < 3; ++c)
  {
    for (std::size_t i = 0; i < dims.nx; ++i)
      for (std::size_t j = 0; j < dims.ny; ++j)
        for (std::size_t k = 0; k < dims.nz; ++k)
        {
          if (valid_edge(axis_from_index(c), i, j, k) &&
              materials[edge_material[c][dims.index(i, j, k)]].pec)
            ++count;
        }
  }
  return count;
}

std::size_t MaterialGrid::port_count() const
{
  return static_cast<std::size_t>(std::count_if(lumped.begin(), lumped.end(), [](const auto &l)
                                                { return l.kind == LumpedKind::Port; }));
}

MaterialGrid rasterize(const Scene &scene, const Mesh &mesh, double f0_hz)
{
  for (std::size_t a = 0; a < 3; ++a)
  {
    if (mesh.lines[a].size() < 2)
      throw Error("rasterize: mesh needs at least two lines per axis");
  }
  MaterialGrid grid;
  grid.f0 = f0_hz;
  grid.dims = {mesh.lines[0].size(), mesh.lines[1].size(), mesh.lines[2].size()};
  const GridDims &d = grid.dims;
  const std::size_t n = d.size();

  // Cell centres and edge midpoints per axis, mm.
  std::array<std::vector<double>, 3> centre;
  for (std::size_t a = 0; a < 3; ++a)
  {
    const auto &l = mesh.lines[a];
    grid.nodes[a].resize(l.size());
    for (std::size_t i = 0; i < l.size(); ++i)
      grid.nodes[a][i] = l[i] * constants::mm;
    for (std::size_t i = 0; i + 1 < l.size(); ++i)
      centre[a].push_back(0.5 * (l[i] + l[i + 1]));
  }

  // Owner primitive of every cell (by its centre) and every edge (by its midpoint); -1 = air.
  std::vector<std::int32_t> cell_owner(n, -1);
  std::array<std::vector<std::int32_t>, 3> edge_owner;
  for (auto &e : edge_owner)
    e.assign(n, -1);

  for (std::size_t p = 0; p < scene.primitives.size(); ++p)
  {
    const Box &b = scene.primitives[p].box;
    const auto owner = static_cast<std::int32_t>(p);
    std::array<std::pair<std::size_t, std::size_t>, 3> cells, nodes;
    for (std::size_t a = 0; a < 3; ++a)
    {
      cells[a] = covered(centre[a], b.lo[a], b.hi[a]);
      nodes[a] = covered(mesh.lines[a], b.lo[a], b.hi[a]);
    }
    auto paint = [&](std::vector<std::int32_t> &arr, const std::array<std::pair<std::size_t, std::size_t>, 3> &r)
    {
      for (std::size_t i = r[0].first; i < r[0].second; ++i)
        for (std::size_t j = r[1].first; j < r[1].second; ++j)
          for (std::size_t k = r[2].first; k < r[2].second; ++k)
            arr[d.index(i, j, k)] = owner;
    };
    paint(cell_owner, cells);
    paint(edge_owner[0], {cells[0], nodes[1], nodes[2]});
    paint(edge_owner[1], {nodes[0], cells[1], nodes[2]});
    paint(edge_owner[2], {nodes[0], nodes[1], cells[2]});
  }

  // Lumped elements. Port and load edges are never conductors; probes only observe.
  std::array<std::unordered_set<std::size_t>, 3> lumped_edges;
  for (const auto &item : scene.lumped_items)
  {
    LumpedElement el;
    el.label = item.label;
    el.kind = item.kind;
    el.port_index = item.port_index;
    el.role = item.role;
    el.port_resistance = item.port_resistance;
    el.series = item.series;
    const std::size_t a = index(item.axis);
    const Vec3 s = item.start;
    const Vec3 e = item.end();
    std::array<std::size_t, 3> idx{};
    for (std::size_t t = 0; t < 3; ++t)
      idx[t] = line_index(mesh.lines[t], s[t], item.label);
    const std::size_t last = line_index(mesh.lines[a], e[a], item.label);
    if (last <= idx[a])
      throw Error("lumped item '" + item.label + "' spans no mesh edge");
    for (std::size_t m = idx[a]; m < last; ++m)
    {
      std::array<std::size_t, 3> p = idx;
      p[a] = m;
      LumpedEdge edge{a, p[0], p[1], p[2], 0.0, 1.0};
      const auto &nd = grid.nodes;
      edge.length = nd[a][m + 1] - nd[a][m];
      for (std::size_t t = 0; t < 3; ++t)
      {
        if (t == a)
          continue;
        const auto &x = nd[t];
        const std::size_t q = p[t];
        const double lo = q > 0 ? 0.5 * (x[q] - x[q - 1]) : 0.0;
        const double hi = q + 1 < x.size() ? 0.5 * (x[q + 1] - x[q]) : 0.0;
        edge.dual_area *= lo + hi;
      }
      el.total_length += edge.length;
      el.edges.push_back(edge);
      if (item.kind != LumpedKind::Probe)
        lumped_edges[a].insert(d.index(p[0], p[1], p[2]));
    }
    grid.lumped.push_back(std::move(el));
  }

  // Cell material properties.
  auto cell_props = [&](std::int32_t owner) -> std::pair<double, double>
  {
    if (owner < 0)
      return {1.0, 0.0};
    const Material &m = scene.primitives[static_cast<std::size_t>(owner)].material;
    if (m.kind == Material::Kind::Dielectric)
      return {m.eps_r, loss_tangent_conductivity(m.eps_r, m.tan_delta, f0_hz)};
    return {1.0, 0.0};
  };
  auto is_conductor = [&](std::int32_t owner)
  {
    return owner >= 0 &&
           scene.primitives[static_cast<std::size_t>(owner)].material.kind == Material::Kind::Conductor;
  };

  MaterialTable table;
  const std::uint16_t pec_id = table.id({constants::eps0, 0.0, true});
  const std::array<std::size_t, 3> count{d.nx, d.ny, d.nz};
  const auto &ln = mesh.lines;
  for (std::size_t c = 0; c < 3; ++c)
  {
    auto &ids = grid.edge_material[c];
    ids.assign(n, pec_id);
    const std::size_t b1 = (c + 1) % 3, b2 = (c + 2) % 3;
    for (std::size_t i = 0; i < d.nx; ++i)
      for (std::size_t j = 0; j < d.ny; ++j)
        for (std::size_t k = 0; k < d.nz; ++k)
        {
          const std::array<std::size_t, 3> p{i, j, k};
          if (p[c] + 1 >= count[c])
            continue;
          const std::size_t id = d.index(i, j, k);
          const bool lumped = lumped_edges[c].count(id) != 0;
          const bool boundary = p[b1] == 0 || p[b1] + 1 == count[b1] || p[b2] == 0 ||
                                p[b2] + 1 == count[b2];
          if (boundary || (!lumped && is_conductor(edge_owner[c][id])))
            continue;
          // Quarter-area weights of the four cells around the edge.
          double wsum = 0.0, eps = 0.0, sig = 0.0;
          for (int s1 = -1; s1 <= 0; ++s1)
            for (int s2 = -1; s2 <= 0; ++s2)
            {
              std::array<std::size_t, 3> q = p;
              q[b1] = p[b1] + static_cast<std::size_t>(s1);
              q[b2] = p[b2] + static_cast<std::size_t>(s2);
              const double w = (ln[b1][q[b1] + 1] - ln[b1][q[b1]]) * (ln[b2][q[b2] + 1] - ln[b2][q[b2]]);
              const auto [er, sg] = cell_props(cell_owner[d.index(q[0], q[1], q[2])]);
              wsum += w;
              eps += w * er;
              sig += w * sg;
            }
          ids[id] = table.id({constants::eps0 * eps / wsum, sig / wsum, false});
        }
  }
  grid.materials = table.release();
  return grid;
}

}  // namespace ris

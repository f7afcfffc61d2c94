// Copyright 2026 The rissim Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "ris/error.hpp"
#include "ris/material_grid.hpp"
#include "ris/simulation.hpp"

using namespace ris;

namespace
{

constexpr double kEps0 = 8.8541878128e-12;

Scene filled_box(double eps_r)
{
  Scene s;
  s.primitives.push_back({{{0, 0, 0}, {8, 8, 8}}, Material::dielectric(eps_r, 0.0), Part::Other, "fill"});
  s.finalize();
  return s;
}

}  // namespace

TEST(MaterialGrid, LossTangentConductivity)
{
  // sigma = omega eps0 eps_r tan_delta
  const double expected = 2.0 * std::numbers::pi * 8e9 * kEps0 * 2.2 * 0.024;
  EXPECT_NEAR(loss_tangent_conductivity(2.2, 0.024, 8e9), expected, 1e-12 * expected);
  EXPECT_NEAR(expected, 2.35e-2, 1e-4);
}

TEST(MaterialGrid, InteriorEdgeOfUniformFill)
{
  const auto mesh = Mesh::uniform({{0, 0, 0}, {8, 8, 8}}, 1.0);
  const auto g = rasterize(filled_box(2.2), mesh, 8e9);
  EXPECT_NEAR(g.eps(Axis::X, 3, 4, 4), 2.2 * kEps0, 1e-20);
  EXPECT_FALSE(g.is_pec(Axis::X, 3, 4, 4));
  // tangential edges on the outer face are perfect conductors
  EXPECT_TRUE(g.is_pec(Axis::X, 3, 0, 4));
  EXPECT_TRUE(g.is_pec(Axis::Z, 0, 3, 3));
}

TEST(MaterialGrid, InterfaceEdgeAveragesFourCells)
{
  // half of the cells around the edge are dielectric
  Scene s;
  s.primitives.push_back({{{0, 0, 0}, {8, 8, 4}}, Material::dielectric(4.0, 0.0), Part::Other, "lower"});
  s.primitives.push_back({{{0, 0, 4}, {8, 8, 8}}, Material::air(), Part::Other, "upper"});
  s.finalize();
  const auto g = rasterize(s, Mesh::uniform({{0, 0, 0}, {8, 8, 8}}, 1.0), 8e9);
  EXPECT_NEAR(g.eps(Axis::X, 3, 4, 4), 2.5 * kEps0, 1e-20);
}

TEST(MaterialGrid, ConductorSheetAndPortEdge)
{
  Scene s;
  s.primitives.push_back({{{2, 2, 4}, {6, 6, 4}}, Material::conductor(), Part::Other, "sheet"});
  LumpedItem p;
  p.kind = LumpedKind::Port;
  p.start = {4, 4, 4};
  p.axis = Axis::X;
  p.length = 1.0;
  p.port_index = 0;
  p.role = PortRole::Active;
  s.lumped_items.push_back(p);
  s.finalize();
  const auto g = rasterize(s, Mesh::uniform({{0, 0, 0}, {8, 8, 8}}, 1.0), 8e9);
  EXPECT_TRUE(g.is_pec(Axis::X, 2, 3, 4));
  EXPECT_TRUE(g.is_pec(Axis::Y, 3, 2, 4));
  EXPECT_FALSE(g.is_pec(Axis::X, 4, 4, 4));  // the port edge cuts the sheet
  EXPECT_FALSE(g.is_pec(Axis::Z, 3, 3, 3));  // normal to the sheet
  ASSERT_EQ(g.port_count(), 1u);
  ASSERT_EQ(g.lumped[0].edges.size(), 1u);
  EXPECT_NEAR(g.lumped[0].total_length, 1e-3, 1e-15);
}

TEST(MaterialGrid, MisalignedLumpedItemRejected)
{
  auto s = ristest::port_scene();
  s.lumped_items[0].start.x = 6.5;
  s.finalize();
  EXPECT_THROW(rasterize(s, ristest::port_mesh(), 8e9), Error);
}

TEST(MaterialGrid, TimestepScalesWithRefractiveIndex)
{
  const auto mesh = Mesh::uniform({{0, 0, 0}, {8, 8, 8}}, 1.0);
  const double dt1 = stable_timestep(mesh, rasterize(filled_box(1.0), mesh, 8e9), 0.95);
  const double dt4 = stable_timestep(mesh, rasterize(filled_box(4.0), mesh, 8e9), 0.95);
  EXPECT_NEAR(dt4 / dt1, 2.0, 1e-12);
  // vacuum Courant limit for a 1 mm cube
  EXPECT_NEAR(dt1, 0.95 * 1e-3 / (299792458.0 * std::sqrt(3.0)), 1e-20);
}

// Copyright 2026 The rissim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "ris/material_grid.hpp"
#include "ris/mesh.hpp"
#include "ris/scene.hpp"

namespace ristest
{

// Vacuum box, 1 mm cells, one z-directed port in the middle and an optional second one.
inline ris::Scene port_scene(bool two_ports = false)
{
  ris::Scene s;
  ris::LumpedItem p;
  p.label = "p0";
  p.kind = ris::LumpedKind::Port;
  p.start = {6, 6, 6};
  p.axis = ris::Axis::Z;
  p.length = 2.0;
  p.role = ris::PortRole::Active;
  p.port_index = 0;
  s.lumped_items.push_back(p);
  if (two_ports)
  {
    p.label = "p1";
    p.start = {10, 6, 6};
    p.role = ris::PortRole::Passive;
    p.port_index = 1;
    s.lumped_items.push_back(p);
  }
  s.primitives.push_back({{{8, 3, 3}, {9, 9, 9}},
                          ris::Material::dielectric(3.0, 0.05),
                          ris::Part::Other,
                          "block"});
  s.finalize();
  return s;
}

inline ris::Mesh port_mesh(int pml = 4) { return ris::Mesh::uniform({{0, 0, 0}, {16, 12, 14}}, 1.0, pml); }

}  // namespace ristest

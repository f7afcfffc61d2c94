// Copyright 2026 The rissim Authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include "ris/material_grid.hpp"
#include "ris/mesh.hpp"
#include "ris/scene.hpp"
#include "ris/simulation.hpp"
#include "ris/source.hpp"

namespace
{

// Fixed number of steps on a vacuum box with one port; reports cells/s.
void BM_SolverSteps(benchmark::State &state)
{
  const double n = static_cast<double>(state.range(0));
  ris::Scene scene;
  scene.bounds = {{0, 0, 0}, {n, n, n}};
  ris::LumpedItem port;
  port.label = "p0";
  port.kind = ris::LumpedKind::Port;
  port.start = {n / 2, n / 2, n / 2};
  port.axis = ris::Axis::Z;
  port.length = 1.0;
  port.role = ris::PortRole::Active;
  port.port_index = 0;
  scene.lumped_items.push_back(port);
  scene.finalize();
  const auto mesh = ris::Mesh::uniform({{-8, -8, -8}, {n + 8, n + 8, n + 8}}, 1.0, 8);
  const auto grid = ris::rasterize(scene, mesh, 8e9);
  ris::RunConfig cfg;
  cfg.max_timesteps = 100;
  cfg.energy_stop_db = -1000.0;
  cfg.workers = 1;
  for (auto _ : state)
  {
    auto rec = ris::run_simulation(grid, mesh, 0, ris::SourceSpec{}, cfg);
    benchmark::DoNotOptimize(rec.voltage.data());
  }
  const double cells = static_cast<double>(mesh.cell_count()) * static_cast<double>(cfg.max_timesteps);
  state.counters["cells_per_s"] = benchmark::Counter(cells, benchmark::Counter::kIsIterationInvariantRate);
}
BENCHMARK(BM_SolverSteps)->Arg(16)->Arg(48)->Unit(benchmark::kMillisecond);

}  // namespace

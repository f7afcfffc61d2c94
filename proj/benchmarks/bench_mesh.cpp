// Copyright 2026 The rissim Authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include "ris/mesh.hpp"
#include "ris/scene.hpp"

namespace
{

void BM_MeshPair(benchmark::State &state)
{
  ris::PairSpec spec;
  spec.ris1.rows = spec.ris1.cols = static_cast<int>(state.range(0));
  spec.ris2.rows = spec.ris2.cols = static_cast<int>(state.range(0));
  const auto scene = ris::build_pair(spec);
  const ris::MeshSpec ms;
  for (auto _ : state)
  {
    auto m = ris::generate_mesh(scene, ms);
    benchmark::DoNotOptimize(m.lines[0].data());
  }
}
BENCHMARK(BM_MeshPair)->Arg(1)->Arg(3)->Arg(11)->Unit(benchmark::kMillisecond);

}  // namespace

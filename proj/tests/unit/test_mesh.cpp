// Copyright 2026 The rissim Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "ris/error.hpp"
#include "ris/mesh.hpp"
#include "ris/scene.hpp"

using namespace ris;

namespace
{

struct LineSet
{
  std::vector<double> lines;
  std::vector<std::uint8_t> fixed;
  double threshold;
};

LineSet random_set(std::mt19937_64 &rng)
{
  std::uniform_int_distribution<int> count(2, 60);
  std::uniform_real_distribution<double> pos(-10.0, 10.0);
  std::uniform_real_distribution<double> thr(0.02, 1.5);
  std::bernoulli_distribution fix(0.35);
  std::set<double> xs;
  const int n = count(rng);
  while (static_cast<int>(xs.size()) < n)
    xs.insert(pos(rng));
  LineSet s;
  for (double x : xs)
  {
    s.lines.push_back(x);
    s.fixed.push_back(fix(rng) ? 1 : 0);
  }
  s.threshold = thr(rng);
  return s;
}

bool is_fixed(const LineSet &s, double v)
{
  const auto it = std::lower_bound(s.lines.begin(), s.lines.end(), v);
  return it != s.lines.end() && *it == v && s.fixed[static_cast<std::size_t>(it - s.lines.begin())];
}

PairSpec small_pair()
{
  PairSpec p;
  p.ris1.rows = p.ris2.rows = 2;
  p.ris1.cols = p.ris2.cols = 2;
  return p;
}

}  // namespace

TEST(SmoothLines, RandomizedProperties)
{
  std::mt19937_64 rng(20260101);
  for (int trial = 0; trial < 1000; ++trial)
  {
    const LineSet s = random_set(rng);
    const auto out = smooth_lines(s.lines, s.fixed, s.threshold);
    ASSERT_TRUE(std::is_sorted(out.begin(), out.end()));
    // every fixed line survives, every output line came from the input
    for (std::size_t i = 0; i < s.lines.size(); ++i)
      if (s.fixed[i])
      {
        ASSERT_TRUE(std::binary_search(out.begin(), out.end(), s.lines[i])) << trial;
      }
    for (double v : out)
    {
      ASSERT_TRUE(std::binary_search(s.lines.begin(), s.lines.end(), v));
    }
    // no removable close pair left
    for (std::size_t i = 0; i + 1 < out.size(); ++i)
      if (out[i + 1] - out[i] < s.threshold)
      {
        ASSERT_TRUE(is_fixed(s, out[i]) && is_fixed(s, out[i + 1])) << trial;
      }
    // idempotence and determinism
    std::vector<std::uint8_t> f2;
    for (double v : out)
      f2.push_back(is_fixed(s, v) ? 1 : 0);
    ASSERT_EQ(smooth_lines(out, f2, s.threshold), out);
    ASSERT_EQ(smooth_lines(s.lines, s.fixed, s.threshold), out);
  }
}

TEST(SmoothLines, KeepsCloseFixedPair)
{
  const std::vector<double> lines{0.0, 0.1, 0.15, 1.0};
  const std::vector<std::uint8_t> fixed{1, 1, 0, 1};
  const auto out = smooth_lines(lines, fixed, 0.3);
  EXPECT_EQ(out, (std::vector<double>{0.0, 0.1, 1.0}));
}

TEST(MeshAxis, IdempotentOnOwnOutput)
{
  MeshSpec spec;
  const std::vector<double> fixed{-20.0, -5.0, -4.5, 0.0, 3.0, 20.0};
  const std::vector<ResolutionRegion> regions{{-5.0, 3.0, spec.fine_resolution}};
  const std::vector<double> refine{-5.35, 3.35};
  const auto lines = mesh_axis(fixed, regions, refine, spec);
  EXPECT_EQ(mesh_axis(lines, regions, {}, spec), lines);
}

TEST(MeshAxis, ResolutionAndGrading)
{
  MeshSpec spec;
  const std::vector<double> fixed{-30.0, -1.0, 1.0, 30.0};
  const std::vector<ResolutionRegion> regions{{-1.0, 1.0, spec.fine_resolution}};
  const auto lines = mesh_axis(fixed, regions, {}, spec);
  for (std::size_t i = 0; i + 1 < lines.size(); ++i)
  {
    const double d = lines[i + 1] - lines[i];
    EXPECT_LE(d, spec.coarse_resolution + 1e-9);
    if (lines[i] >= -1.0 && lines[i + 1] <= 1.0)
    {
      EXPECT_LE(d, spec.fine_resolution + 1e-9);
    }
    if (i + 2 < lines.size())
    {
      const double e = lines[i + 2] - lines[i + 1];
      EXPECT_LE(std::max(d, e) / std::min(d, e), spec.max_grading + 1e-9);
    }
  }
}

TEST(GenerateMesh, SceneLinesPreservedExactly)
{
  const Scene scene = build_pair(small_pair());
  const Mesh m = generate_mesh(scene, MeshSpec{});
  for (std::size_t a = 0; a < 3; ++a)
  {
    for (double v : scene.fixed_lines[a])
    {
      EXPECT_TRUE(std::binary_search(m.lines[a].begin(), m.lines[a].end(), v)) << a << " " << v;
    }
  }
}

TEST(GenerateMesh, Deterministic)
{
  const Scene scene = build_pair(small_pair());
  EXPECT_EQ(generate_mesh(scene, MeshSpec{}), generate_mesh(scene, MeshSpec{}));
}

TEST(GenerateMesh, FinerResolutionNeverFewerCells)
{
  const Scene scene = build_pair(PairSpec{});
  std::size_t prev = 0;
  for (double fine : {1.0, 0.8, 0.6, 0.5, 0.4, 0.35})
  {
    MeshSpec spec;
    spec.fine_resolution = fine;
    const auto n = generate_mesh(scene, spec).cell_count();
    EXPECT_GE(n, prev) << fine;
    prev = n;
  }
}

TEST(GenerateMesh, SpacingsAboveThresholdExceptFixedPairs)
{
  const Scene scene = build_pair(small_pair());
  const MeshSpec spec;
  const Mesh m = generate_mesh(scene, spec);
  for (std::size_t a = 0; a < 3; ++a)
  {
    const auto &l = m.lines[a];
    for (std::size_t i = 0; i + 1 < l.size(); ++i)
      if (l[i + 1] - l[i] < spec.threshold() - 1e-9)
      {
        EXPECT_TRUE(m.fixed[a][i] && m.fixed[a][i + 1]) << a << " at " << l[i];
      }
  }
}

TEST(GenerateMesh, PaddingAndAbsorber)
{
  const Scene scene = build_pair(PairSpec{});
  MeshSpec spec;
  spec.pml_cells = 6;
  const Mesh m = generate_mesh(scene, spec);
  EXPECT_EQ(m.pml_cells, 6);
  for (std::size_t a = 0; a < 3; ++a)
  {
    const auto &l = m.lines[a];
    const double inner_lo = l[6], inner_hi = l[l.size() - 7];
    EXPECT_LE(inner_lo, scene.bounds.lo[a] - spec.air_padding + 1e-9);
    EXPECT_GE(inner_hi, scene.bounds.hi[a] + spec.air_padding - 1e-9);
  }
}

TEST(GenerateMesh, ReportFlagsNoViolationsOnDefaults)
{
  const Scene scene = build_pair(PairSpec{});
  const Mesh m = generate_mesh(scene, MeshSpec{});
  const auto r = mesh_report(m, 2.0);
  EXPECT_TRUE(r.grading_violations.empty());
  EXPECT_EQ(r.cells, m.cell_count());
  EXPECT_GT(r.estimated_dt, 0.0);
  EXPECT_NE(r.to_table().find("grading"), std::string::npos);
}

TEST(GenerateMesh, DegenerateSceneRejected)
{
  Scene s;
  s.primitives.push_back({{{0, 0, 0}, {1, 1, 0}}, Material::conductor(), Part::Other, "sheet"});
  s.finalize();
  EXPECT_THROW(generate_mesh(s, MeshSpec{}), ValidationError);
  EXPECT_THROW(generate_mesh(Scene{}, MeshSpec{}), ValidationError);
}

TEST(GenerateMesh, JsonRoundTrip)
{
  const Mesh m = generate_mesh(build_pair(PairSpec{}), MeshSpec{});
  EXPECT_EQ(mesh_from_json(to_json(m)), m);
}

TEST(MeshSpec, DefaultsForSourceBand)
{
  // resolutions refer to the wavelength at f0 + fc/2, padding to the one at f0
  const double c0_mm = 299792458.0 * 1e3;
  const double lambda_hi = c0_mm / 9e9;
  const auto s = MeshSpec::defaults_for(8e9, 2e9, 2.2);
  EXPECT_NEAR(s.fine_resolution, lambda_hi / (20.0 * std::sqrt(2.2)), 1e-9);
  EXPECT_NEAR(s.coarse_resolution, lambda_hi / 15.0, 1e-9);
  EXPECT_NEAR(s.air_padding, c0_mm / 8e9 / 8.0, 1e-9);
  EXPECT_TRUE(validate(s).empty());
}

TEST(GenerateMesh, EmptyAirCubeIsUniform)
{
  Scene s;
  s.primitives.push_back({{{0, 0, 0}, {30, 30, 30}}, Material::air(), Part::Other, "air"});
  s.finalize();
  MeshSpec spec;
  spec.air_padding = 0.0;
  spec.pml_cells = 4;
  const Mesh m = generate_mesh(s, spec);
  for (std::size_t a = 0; a < 3; ++a)
  {
    ASSERT_EQ(m.lines[a].size(), 21u + 8u);
    for (std::size_t i = 0; i + 1 < m.lines[a].size(); ++i)
    {
      EXPECT_NEAR(m.lines[a][i + 1] - m.lines[a][i], 1.5, 1e-9);
    }
  }
}

TEST(GenerateMesh, PaperCellGapsResolved)
{
  // fine 0.35 mm: a 1.05 mm gap gets at least three cells, nothing is thinner than 0.175 mm
  const Scene scene = build_pair(PairSpec{});
  MeshSpec spec;
  spec.fine_resolution = 0.35;
  spec.coarse_resolution = 1.5;
  const Mesh m = generate_mesh(scene, spec);
  for (const auto *port : scene.ports())
  {
    const auto a = index(port->axis);
    const auto &l = m.lines[a];
    const double lo = port->start[a], hi = port->end()[a];
    const auto cells = std::count_if(l.begin(), l.end(), [&](double v) { return v > lo + 1e-9 && v < hi - 1e-9; }) + 1;
    EXPECT_GE(cells, 3);
  }
  for (std::size_t a = 0; a < 3; ++a)
    for (std::size_t i = 0; i + 1 < m.lines[a].size(); ++i)
    {
      EXPECT_GE(m.lines[a][i + 1] - m.lines[a][i], 0.175 - 1e-9);
    }
}

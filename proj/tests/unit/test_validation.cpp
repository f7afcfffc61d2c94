// Copyright 2026 The rissim Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <set>

#include <gtest/gtest.h>

#include "ris/validation.hpp"

using namespace ris;

TEST(LumpedSandbox, SeriesRcImpedance)
{
  // Z = R + 1 / (j w C) for a 30 ohm, 1 pF series load
  SeriesRlc load;
  load.resistance = 30.0;
  load.capacitance = 1e-12;
  const FrequencyGrid g{6e9, 10e9, 9};
  const auto r = run_lumped_sandbox(load, g, 1);
  for (std::size_t f = 0; f < 9; ++f)
  {
    const double w = 2.0 * M_PI * g.at(f);
    const std::complex<double> want(30.0, -1.0 / (w * 1e-12));
    EXPECT_NEAR(std::abs(r.impedance.z[f] - want), 0.0, 0.02 * std::abs(want)) << g.at(f);
  }
}

TEST(LumpedSandbox, SeriesRlImpedance)
{
  SeriesRlc load;
  load.resistance = 20.0;
  load.inductance = 1e-9;
  const FrequencyGrid g{6e9, 10e9, 5};
  const auto r = run_lumped_sandbox(load, g, 1);
  for (std::size_t f = 0; f < 5; ++f)
  {
    const std::complex<double> want(20.0, 2.0 * M_PI * g.at(f) * 1e-9);
    EXPECT_NEAR(std::abs(r.impedance.z[f] - want), 0.0, 0.02 * std::abs(want)) << g.at(f);
  }
}

TEST(TwoDipoles, ReciprocalAndPassive)
{
  const FrequencyGrid g{6e9, 10e9, 41};
  const auto s = run_two_dipoles(g);
  for (std::size_t f = 0; f < 41; ++f)
  {
    EXPECT_LE(std::abs(s.at(0, 1, f) - s.at(1, 0, f)), 0.05);
    for (int j = 0; j < 2; ++j)
    {
      EXPECT_LE(std::norm(s.at(0, j, f)) + std::norm(s.at(1, j, f)), 1.01);
    }
  }
}

TEST(Platform, ReportSchemaAndChecks)
{
  const auto j = validate_platform();
  EXPECT_EQ(j.at("schema"), "ris.validation");
  EXPECT_EQ(j.at("version"), 1);
  std::set<std::string> names;
  for (const auto &c : j.at("checks"))
  {
    names.insert(c.at("name").get<std::string>());
    for (const char *key : {"passed", "measured", "expected", "tolerance", "detail"})
    {
      EXPECT_TRUE(c.contains(key)) << key;
    }
    EXPECT_TRUE(c.at("passed").get<bool>()) << c.dump();
  }
  for (const char *n : {"lumped_resistor_impedance", "lumped_100ohm_reflection", "canonical_reflections",
                        "free_space_propagation", "closed_box_energy", "reciprocity", "passivity",
                        "mesh_properties", "de_sphere"})
    EXPECT_TRUE(names.count(n)) << n;
  EXPECT_TRUE(j.at("passed").get<bool>());
}

TEST(Platform, DisabledAbsorberIsCaught)
{
  // fault injection: without the absorber the free-space check must fail
  const auto r = run_free_space(false);
  const double expected = 0.030 / 299792458.0;
  EXPECT_GT(std::abs(r.delay - expected), 2.0 * r.dt);
}

// Copyright 2026 The rissim Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <complex>
#include <numbers>

#include <gtest/gtest.h>

#include "ris/source.hpp"

using namespace ris;

TEST(Source, SymmetricAboutDelay)
{
  const SourceSpec s;
  for (double u : {1e-12, 5e-11, 1.3e-10})
  {
    EXPECT_NEAR(gaussian_excitation(s.delay() + u, s), gaussian_excitation(s.delay() - u, s), 1e-12);
  }
  EXPECT_DOUBLE_EQ(gaussian_excitation(s.delay(), s), s.amplitude);
}

TEST(Source, SpectrumTwentyDbDownAtBandEdges)
{
  // numerical Fourier transform of the pulse; the band edges f0 +/- fc sit 20 dB below f0
  const SourceSpec s;
  const double dt = 1e-13;
  auto mag = [&](double f) {
    std::complex<double> acc;
    for (double t = 0.0; t < 2.0 * s.end_time(); t += dt)
      acc += gaussian_excitation(t, s) * std::polar(1.0, -2.0 * std::numbers::pi * f * t);
    return std::abs(acc);
  };
  const double peak = mag(s.f0);
  EXPECT_NEAR(20.0 * std::log10(mag(s.f0 + s.fc) / peak), -20.0, 0.1);
  EXPECT_NEAR(20.0 * std::log10(mag(s.f0 - s.fc) / peak), -20.0, 0.1);
}

TEST(Source, StartsNegligible)
{
  const SourceSpec s;
  EXPECT_LT(std::abs(gaussian_excitation(0.0, s)), 1e-3);
  EXPECT_LT(std::abs(gaussian_excitation(s.end_time(), s)), 1e-10);
  EXPECT_GT(s.end_time(), s.delay());
}

TEST(Source, Validation)
{
  SourceSpec s;
  EXPECT_TRUE(validate(s).empty());
  s.fc = 0.0;
  EXPECT_FALSE(validate(s).empty());
  s = SourceSpec{};
  s.amplitude = 0.0;
  EXPECT_TRUE(validate(s).empty());
}

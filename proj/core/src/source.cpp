// Copyright 2026 The rissim Authors
// SPDX-License-Identifier: Apache-2.0

#include "ris/source.hpp"

#include <cmath>

#include "ris/constants.hpp"

namespace ris
{

double SourceSpec::tau() const noexcept
{
  // (pi fc tau)^2 = 2.3 puts the spectrum about 20 dB down at f0 +/- fc.
  return std::sqrt(2.3) / (constants::pi * fc);
}

double SourceSpec::delay() const noexcept { return 3.0 * tau(); }

double SourceSpec::end_time() const noexcept { return delay() + 5.0 * tau(); }

std::vector<std::string> validate(const SourceSpec &src)
{
  std::vector<std::string> v;
  if (!(src.f0 > 0.0))
    v.emplace_back("source.f0: must be > 0");
  if (!(src.fc > 0.0))
    v.emplace_back("source.fc: must be > 0");
  if (!std::isfinite(src.amplitude))
    v.emplace_back("source.amplitude: must be finite");
  return v;
}

double gaussian_excitation(double t, const SourceSpec &src) noexcept
{
  const double u = t - src.delay();
  const double w = u / src.tau();
  return src.amplitude * std::cos(2.0 * constants::pi * src.f0 * u) * std::exp(-w * w);
}

}  // namespace ris

// Copyright 2026 The rissim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

namespace ris
{

/// Gaussian-modulated sinusoid driving the active port. The pulse width is chosen so the
/// spectrum is 20 dB down at f0 +/- fc; the delay gives a causal start.
struct SourceSpec
{
  double f0 = 8e9;         // Hz
  double fc = 2e9;         // Hz
  double amplitude = 1.0;  // V

  double tau() const noexcept;    // s
  double delay() const noexcept;  // t0, s
  /// Time after which the solver treats the excitation as switched off (t0 + 5 tau).
  double end_time() const noexcept;

  friend bool operator==(const SourceSpec &, const SourceSpec &) = default;
};

std::vector<std::string> validate(const SourceSpec &src);

/// amplitude * cos(2 pi f0 (t - t0)) * exp(-((t - t0) / tau)^2)
double gaussian_excitation(double t, const SourceSpec &src) noexcept;

}  // namespace ris

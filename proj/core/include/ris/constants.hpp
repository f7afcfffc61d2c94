// Copyright 2026 The rissim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <numbers>

namespace ris::constants
{

inline constexpr double c0 = 299792458.0;                   // m/s
inline constexpr double mu0 = 1.25663706212e-6;             // H/m
inline constexpr double eps0 = 1.0 / (mu0 * c0 * c0);       // F/m
inline constexpr double eta0 = mu0 * c0;                    // ohm
inline constexpr double pi = std::numbers::pi;
inline constexpr double mm = 1e-3;                          // metres per millimetre

}  // namespace ris::constants

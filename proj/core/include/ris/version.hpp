// Copyright 2026 The rissim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

namespace ris
{

inline constexpr const char *kVersion = "0.1.0";

}  // namespace ris

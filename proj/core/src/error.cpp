// Copyright 2026 The rissim Authors
// SPDX-License-Identifier: Apache-2.0

#include "ris/error.hpp"

#include "ris/geometry.hpp"

namespace ris
{

namespace
{

std::string join_violations(const std::vector<std::string> &v)
{
  std::string msg = "invalid input";
  for (const auto &s : v)
  {
    msg += "\n  - " + s;
  }
  return msg;
}

}  // namespace

ValidationError::ValidationError(std::vector<std::string> violations)
  : Error(join_violations(violations)), violations_(std::move(violations))
{
}

const char *axis_name(Axis a) noexcept
{
  switch (a)
  {
    case Axis::X:
      return "x";
    case Axis::Y:
      return "y";
    case Axis::Z:
      return "z";
  }
  return "?";
}

}  // namespace ris

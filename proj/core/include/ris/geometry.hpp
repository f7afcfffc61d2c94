// Copyright 2026 The rissim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <array>
#include <cstddef>

namespace ris
{

enum class Axis : int
{
  X = 0,
  Y = 1,
  Z = 2
};

constexpr std::size_t index(Axis a) noexcept { return static_cast<std::size_t>(a); }
constexpr Axis axis_from_index(std::size_t i) noexcept { return static_cast<Axis>(i); }
const char *axis_name(Axis a) noexcept;

/// Point or displacement in millimetres.
struct Vec3
{
  double x = 0.0, y = 0.0, z = 0.0;

  double operator[](std::size_t i) const noexcept { return i == 0 ? x : (i == 1 ? y : z); }
  double &operator[](std::size_t i) noexcept { return i == 0 ? x : (i == 1 ? y : z); }
  double operator[](Axis a) const noexcept { return (*this)[index(a)]; }
  double &operator[](Axis a) noexcept { return (*this)[index(a)]; }

  friend Vec3 operator+(Vec3 a, const Vec3 &b) noexcept
  {
    return {a.x + b.x, a.y + b.y, a.z + b.z};
  }
  friend Vec3 operator-(Vec3 a, const Vec3 &b) noexcept
  {
    return {a.x - b.x, a.y - b.y, a.z - b.z};
  }
  friend bool operator==(const Vec3 &, const Vec3 &) = default;
};

/// Axis-aligned box, closed on all faces. A zero extent along one axis describes a sheet.
struct Box
{
  Vec3 lo, hi;

  static Box from_corners(const Vec3 &a, const Vec3 &b) noexcept
  {
    return {{std::min(a.x, b.x), std::min(a.y, b.y), std::min(a.z, b.z)},
            {std::max(a.x, b.x), std::max(a.y, b.y), std::max(a.z, b.z)}};
  }

  double extent(std::size_t axis) const noexcept { return hi[axis] - lo[axis]; }

  bool contains(const Vec3 &p, double tol = 0.0) const noexcept
  {
    for (std::size_t a = 0; a < 3; ++a)
    {
      if (p[a] < lo[a] - tol || p[a] > hi[a] + tol)
      {
        return false;
      }
    }
    return true;
  }

  Box translated(const Vec3 &d) const noexcept { return {lo + d, hi + d}; }

  Box united(const Box &o) const noexcept
  {
    return {{std::min(lo.x, o.lo.x), std::min(lo.y, o.lo.y), std::min(lo.z, o.lo.z)},
            {std::max(hi.x, o.hi.x), std::max(hi.y, o.hi.y), std::max(hi.z, o.hi.z)}};
  }

  friend bool operator==(const Box &, const Box &) = default;
};

}  // namespace ris

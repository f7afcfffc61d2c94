// Copyright 2026 The rissim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ris/geometry.hpp"

namespace ris
{

//
// Parametric unit cells, RIS arrays and RIS pairs, expressed as a solver-independent list of
// axis-aligned material boxes plus lumped circuit elements. All lengths are millimetres.
//

/// Square split-ring resonator: two concentric rectangular rings, each broken by a gap.
/// The outer ring spans outer_width along x and outer_length along y; its gap sits on the +y
/// side, the inner ring gap on the -y side.
struct SrrSpec
{
  double outer_length = 10.36;       // L2, along y
  double outer_width = 10.9;         // L1, along x
  double outer_gap = 1.05;           // G1
  double inner_gap = 1.05;           // G2
  double outer_trace_width = 1.05;   // w_out
  double inner_trace_width = 1.05;   // w_in
  double ring_separation = 1.05;     // clear space between outer and inner traces
  double metal_thickness = 0.0;      // 0 = zero-thickness sheet

  double inner_width() const noexcept
  {
    return outer_width - 2.0 * outer_trace_width - 2.0 * ring_separation;
  }
  double inner_length() const noexcept
  {
    return outer_length - 2.0 * outer_trace_width - 2.0 * ring_separation;
  }
  friend bool operator==(const SrrSpec &, const SrrSpec &) = default;
};

struct SubstrateSpec
{
  double width = 12.21;    // x
  double length = 12.21;   // y
  double thickness = 4.8;  // z
  double eps_r = 2.2;
  double tan_delta = 0.024;
  bool has_groundplane = true;
  friend bool operator==(const SubstrateSpec &, const SubstrateSpec &) = default;
};

/// Series R-L-C branch. A missing capacitance means the branch has no capacitor (DC path).
struct SeriesRlc
{
  double resistance = 0.0;                // ohm
  double inductance = 0.0;                // henry
  std::optional<double> capacitance;      // farad

  bool is_short() const noexcept
  {
    return resistance == 0.0 && inductance == 0.0 && !capacitance;
  }
  friend bool operator==(const SeriesRlc &, const SeriesRlc &) = default;
};

struct UnitCellSpec
{
  SrrSpec srr;
  SubstrateSpec substrate;
  double port_resistance = 50.0;  // ohm
  SeriesRlc lumped_state;         // tunable element in series with the port, part of the DUT
  friend bool operator==(const UnitCellSpec &, const UnitCellSpec &) = default;
};

enum class PortRole
{
  Active,
  Passive
};

struct ArraySpec
{
  int rows = 1;
  int cols = 1;
  UnitCellSpec cell;
  double pitch = 20.9;            // centre-to-centre SRR spacing, both axes
  double patch_width = 1.2;
  double patch_thickness = 0.0;
  PortRole role = PortRole::Active;
  friend bool operator==(const ArraySpec &, const ArraySpec &) = default;
};

inline ArraySpec passive_array()
{
  ArraySpec a;
  a.role = PortRole::Passive;
  return a;
}

struct PairSpec
{
  ArraySpec ris1;
  ArraySpec ris2 = passive_array();
  double separation = 10.0;  // centre-to-centre of the two substrates along z
  friend bool operator==(const PairSpec &, const PairSpec &) = default;
};

struct Material
{
  enum class Kind
  {
    Air,
    Conductor,
    Dielectric
  };

  Kind kind = Kind::Air;
  double eps_r = 1.0;
  double tan_delta = 0.0;

  static Material air() noexcept { return {}; }
  static Material conductor() noexcept { return {Kind::Conductor, 1.0, 0.0}; }
  static Material dielectric(double eps_r, double tan_delta) noexcept
  {
    return {Kind::Dielectric, eps_r, tan_delta};
  }
  friend bool operator==(const Material &, const Material &) = default;
};

/// What a primitive represents; used for bookkeeping only, never by the solver.
enum class Part
{
  Substrate,
  Groundplane,
  Ring,
  LoadPatch,
  Other
};

struct Primitive
{
  Box box;
  Material material;
  Part part = Part::Other;
  std::string label;
  friend bool operator==(const Primitive &, const Primitive &) = default;
};

enum class LumpedKind
{
  Port,   // Thevenin source: voltage source + internal resistance (+ series state)
  Load,   // passive series R-L-C
  Probe   // voltage probe, no circuit
};

/// Circuit element occupying the straight segment [start, start + length * e_axis].
struct LumpedItem
{
  std::string label;
  LumpedKind kind = LumpedKind::Port;
  Vec3 start;
  Axis axis = Axis::X;
  double length = 0.0;
  double port_resistance = 50.0;
  SeriesRlc series;  // port: tunable state in series; load: the load itself
  PortRole role = PortRole::Passive;
  int port_index = -1;

  Vec3 end() const noexcept
  {
    Vec3 e = start;
    e[axis] += length;
    return e;
  }
  friend bool operator==(const LumpedItem &, const LumpedItem &) = default;
};

struct Scene
{
  std::vector<Primitive> primitives;         // later entries win on overlap
  std::vector<LumpedItem> lumped_items;
  std::array<std::vector<double>, 3> fixed_lines;  // sorted, unique
  Box bounds;

  /// Recomputes fixed lines and bounds from primitives and lumped items.
  void finalize();
  void append(const Scene &other);

  std::size_t port_count() const noexcept;
  std::size_t count(Part part) const noexcept;
  std::vector<const LumpedItem *> ports() const;  // ordered by port_index

  friend bool operator==(const Scene &, const Scene &) = default;
};

/// Orientation of the metal side of a unit cell along the z (boresight) axis.
enum class Facing
{
  PlusZ,
  MinusZ
};

std::vector<std::string> validate(const SrrSpec &spec);
std::vector<std::string> validate(const SubstrateSpec &spec);
std::vector<std::string> validate(const UnitCellSpec &spec);
std::vector<std::string> validate(const ArraySpec &spec, const std::string &prefix = "array");
/// Every violated invariant of the pair, each naming the field and constraint. Empty iff valid.
std::vector<std::string> validate_spec(const PairSpec &spec);

/// One unit cell centred (substrate centre) at `origin`. Throws ValidationError.
Scene build_unit_cell(const UnitCellSpec &spec, const Vec3 &origin,
                      Facing facing = Facing::PlusZ, PortRole role = PortRole::Active);

/// A rows x cols array centred at `origin` with load patches between neighbours.
Scene build_array(const ArraySpec &spec, const Vec3 &origin, Facing facing,
                  int first_port_index, const std::string &prefix);

/// Two facing arrays: RIS1 below z=0 facing +z, RIS2 above facing -z. Ports are numbered
/// row-major, RIS1 first.
Scene build_pair(const PairSpec &spec);

/// Expected number of load patches in one rows x cols array.
constexpr int load_patch_count(int rows, int cols) noexcept
{
  return rows * (cols - 1) + (rows - 1) * cols;
}

Scene translated(const Scene &scene, const Vec3 &d);

nlohmann::json to_json(const Scene &scene);
Scene scene_from_json(const nlohmann::json &j);

}  // namespace ris

// Copyright 2026 The rissim Authors
// SPDX-License-Identifier: Apache-2.0

#include "ris/scene.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ris/error.hpp"

namespace ris
{

namespace
{

constexpr double kLineMergeTol = 1e-9;  // mm

std::string fmt_num(double v)
{
  std::ostringstream os;
  os << v;
  return os.str();
}

void sort_unique(std::vector<double> &v)
{
  std::sort(v.begin(), v.end());
  std::vector<double> out;
  out.reserve(v.size());
  for (double x : v)
  {
    if (out.empty() || x - out.back() > kLineMergeTol)
    {
      out.push_back(x);
    }
  }
  v = std::move(out);
}

Box sheet_or_slab(double x0, double x1, double y0, double y1, double z_face, double depth)
{
  // depth > 0 grows towards +z, depth < 0 towards -z, depth == 0 is a sheet
  return Box::from_corners({x0, y0, z_face}, {x1, y1, z_face + depth});
}

struct CellFrame
{
  double cx, cy;
  double z_front;  // metal plane
  double outward;  // +1 if metal grows towards +z
};

void add_cell_metal(Scene &scene, const UnitCellSpec &cell, const CellFrame &f,
                    const std::string &prefix)
{
  const SrrSpec &s = cell.srr;
  const double m = s.metal_thickness * f.outward;
  auto add = [&](double x0, double x1, double y0, double y1, const char *name)
  {
    scene.primitives.push_back({sheet_or_slab(x0, x1, y0, y1, f.z_front, m),
                                Material::conductor(), Part::Ring, prefix + name});
  };

  // outer ring, gap on +y
  {
    const double x0 = f.cx - 0.5 * s.outer_width, x1 = f.cx + 0.5 * s.outer_width;
    const double y0 = f.cy - 0.5 * s.outer_length, y1 = f.cy + 0.5 * s.outer_length;
    const double w = s.outer_trace_width;
    const double g0 = f.cx - 0.5 * s.outer_gap, g1 = f.cx + 0.5 * s.outer_gap;
    add(x0, x1, y0, y0 + w, "outer_bottom");
    add(x0, x0 + w, y0, y1, "outer_left");
    add(x1 - w, x1, y0, y1, "outer_right");
    add(x0, g0, y1 - w, y1, "outer_top_left");
    add(g1, x1, y1 - w, y1, "outer_top_right");
  }
  // inner ring, gap on -y
  {
    const double iw = s.inner_width(), il = s.inner_length();
    const double x0 = f.cx - 0.5 * iw, x1 = f.cx + 0.5 * iw;
    const double y0 = f.cy - 0.5 * il, y1 = f.cy + 0.5 * il;
    const double w = s.inner_trace_width;
    const double g0 = f.cx - 0.5 * s.inner_gap, g1 = f.cx + 0.5 * s.inner_gap;
    add(x0, x1, y1 - w, y1, "inner_top");
    add(x0, x0 + w, y0, y1, "inner_left");
    add(x1 - w, x1, y0, y1, "inner_right");
    add(x0, g0, y0, y0 + w, "inner_bottom_left");
    add(g1, x1, y0, y0 + w, "inner_bottom_right");
  }
}

LumpedItem cell_port(const UnitCellSpec &cell, const CellFrame &f, const std::string &label,
                     PortRole role, int index)
{
  const SrrSpec &s = cell.srr;
  LumpedItem p;
  p.label = label;
  p.kind = LumpedKind::Port;
  const double g0 = f.cx - 0.5 * s.outer_gap, g1 = f.cx + 0.5 * s.outer_gap;
  p.start = {g0, f.cy + 0.5 * s.outer_length - 0.5 * s.outer_trace_width, f.z_front};
  p.axis = Axis::X;
  p.length = g1 - g0;  // same end line as the ring pieces
  p.port_resistance = cell.port_resistance;
  p.series = cell.lumped_state;
  p.role = role;
  p.port_index = index;
  return p;
}

double cell_x(const ArraySpec &a, const Vec3 &o, int c)
{
  return o.x + (c - 0.5 * (a.cols - 1)) * a.pitch;
}

double cell_y(const ArraySpec &a, const Vec3 &o, int r)
{
  return o.y + (0.5 * (a.rows - 1) - r) * a.pitch;
}

void require_valid(std::vector<std::string> v)
{
  if (!v.empty())
  {
    throw ValidationError(std::move(v));
  }
}

void check_rlc(const SeriesRlc &z, const std::string &prefix, std::vector<std::string> &out)
{
  if (!(z.resistance >= 0.0))
  {
    out.push_back(prefix + ".resistance: must be >= 0");
  }
  if (!(z.inductance >= 0.0))
  {
    out.push_back(prefix + ".inductance: must be >= 0");
  }
  if (z.capacitance && !(*z.capacitance > 0.0))
  {
    out.push_back(prefix + ".capacitance: must be > 0 when present");
  }
}

std::vector<std::string> prefixed(std::vector<std::string> v, const std::string &prefix)
{
  for (auto &s : v)
  {
    s = prefix + "." + s;
  }
  return v;
}

}  // namespace

void Scene::finalize()
{
  for (auto &lines : fixed_lines)
  {
    lines.clear();
  }
  bool first = true;
  auto grow = [&](const Box &b)
  {
    bounds = first ? b : bounds.united(b);
    first = false;
  };
  for (const auto &p : primitives)
  {
    for (std::size_t a = 0; a < 3; ++a)
    {
      fixed_lines[a].push_back(p.box.lo[a]);
      fixed_lines[a].push_back(p.box.hi[a]);
    }
    grow(p.box);
  }
  for (const auto &l : lumped_items)
  {
    const Vec3 e = l.end();
    for (std::size_t a = 0; a < 3; ++a)
    {
      fixed_lines[a].push_back(l.start[a]);
      fixed_lines[a].push_back(e[a]);
    }
    grow(Box::from_corners(l.start, e));
  }
  if (first)
  {
    bounds = {};
  }
  for (auto &lines : fixed_lines)
  {
    sort_unique(lines);
  }
}

void Scene::append(const Scene &other)
{
  primitives.insert(primitives.end(), other.primitives.begin(), other.primitives.end());
  lumped_items.insert(lumped_items.end(), other.lumped_items.begin(), other.lumped_items.end());
  finalize();
}

std::size_t Scene::port_count() const noexcept
{
  return static_cast<std::size_t>(
      std::count_if(lumped_items.begin(), lumped_items.end(),
                    [](const LumpedItem &l) { return l.kind == LumpedKind::Port; }));
}

std::size_t Scene::count(Part part) const noexcept
{
  return static_cast<std::size_t>(std::count_if(primitives.begin(), primitives.end(),
                                                [&](const Primitive &p)
                                                { return p.part == part; }));
}

std::vector<const LumpedItem *> Scene::ports() const
{
  std::vector<const LumpedItem *> out;
  for (const auto &l : lumped_items)
  {
    if (l.kind == LumpedKind::Port)
    {
      out.push_back(&l);
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const LumpedItem *a, const LumpedItem *b)
                   { return a->port_index < b->port_index; });
  return out;
}

std::vector<std::string> validate(const SrrSpec &s)
{
  std::vector<std::string> v;
  auto positive = [&](double x, const char *name)
  {
    if (!(x > 0.0))
    {
      v.push_back(std::string(name) + ": must be > 0 (got " + fmt_num(x) + ")");
    }
  };
  positive(s.outer_length, "outer_length");
  positive(s.outer_width, "outer_width");
  positive(s.outer_gap, "outer_gap");
  positive(s.inner_gap, "inner_gap");
  positive(s.outer_trace_width, "outer_trace_width");
  positive(s.inner_trace_width, "inner_trace_width");
  positive(s.ring_separation, "ring_separation");
  if (!(s.metal_thickness >= 0.0))
  {
    v.push_back("metal_thickness: must be >= 0");
  }
  if (!v.empty())
  {
    return v;
  }
  const double room_l = s.inner_length(), room_w = s.inner_width();
  if (!(room_l > 2.0 * s.inner_trace_width) || !(room_w > 2.0 * s.inner_trace_width))
  {
    v.push_back("inner ring must fit strictly inside outer ring "
                "(L2 - 2*w_out - 2*ring_separation > 2*w_in and likewise for L1; got inner "
                "extent " + fmt_num(std::min(room_l, room_w)) + " vs 2*w_in = " +
                fmt_num(2.0 * s.inner_trace_width) + ")");
  }
  if (!(s.outer_gap < s.outer_width))
  {
    v.push_back("outer_gap: G1 must be < L1");
  }
  else if (!(s.outer_gap < s.outer_width - 2.0 * s.outer_trace_width))
  {
    v.push_back("outer_gap: gap must leave both arms of the outer ring (G1 < L1 - 2*w_out)");
  }
  if (!(s.inner_gap < s.outer_width))
  {
    v.push_back("inner_gap: G2 must be < L1");
  }
  else if (room_w > 2.0 * s.inner_trace_width &&
           !(s.inner_gap < room_w - 2.0 * s.inner_trace_width))
  {
    v.push_back("inner_gap: gap must leave both arms of the inner ring");
  }
  return v;
}

std::vector<std::string> validate(const SubstrateSpec &s)
{
  std::vector<std::string> v;
  if (!(s.width > 0.0))
  {
    v.push_back("width: must be > 0");
  }
  if (!(s.length > 0.0))
  {
    v.push_back("length: must be > 0");
  }
  if (!(s.thickness > 0.0))
  {
    v.push_back("thickness: must be > 0");
  }
  if (!(s.eps_r >= 1.0))
  {
    v.push_back("eps_r: must be >= 1 (got " + fmt_num(s.eps_r) + ")");
  }
  if (!(s.tan_delta >= 0.0))
  {
    v.push_back("tan_delta: must be >= 0");
  }
  return v;
}

std::vector<std::string> validate(const UnitCellSpec &c)
{
  std::vector<std::string> v = prefixed(validate(c.srr), "srr");
  auto sub = prefixed(validate(c.substrate), "substrate");
  v.insert(v.end(), sub.begin(), sub.end());
  if (!(c.port_resistance > 0.0))
  {
    v.push_back("port_resistance: must be > 0");
  }
  check_rlc(c.lumped_state, "lumped_state", v);
  if (c.srr.outer_width > c.substrate.width || c.srr.outer_length > c.substrate.length)
  {
    v.push_back("srr: SRR footprint must fit within substrate footprint");
  }
  return v;
}

std::vector<std::string> validate(const ArraySpec &a, const std::string &prefix)
{
  std::vector<std::string> v = prefixed(validate(a.cell), prefix + ".cell");
  if (a.rows < 1)
  {
    v.push_back(prefix + ".rows: must be >= 1");
  }
  if (a.cols < 1)
  {
    v.push_back(prefix + ".cols: must be >= 1");
  }
  const double footprint = std::max(a.cell.srr.outer_width, a.cell.srr.outer_length);
  if (!(a.pitch > footprint))
  {
    v.push_back(prefix + ".pitch: pitch must exceed SRR footprint (pitch=" + fmt_num(a.pitch) +
                " <= max(L1, L2)=" + fmt_num(footprint) + ")");
  }
  if (!(a.patch_width > 0.0))
  {
    v.push_back(prefix + ".patch_width: must be > 0");
  }
  if (!(a.patch_thickness >= 0.0))
  {
    v.push_back(prefix + ".patch_thickness: must be >= 0");
  }
  const SrrSpec &s = a.cell.srr;
  if (a.cols > 1 && a.patch_width > s.outer_length)
  {
    v.push_back(prefix + ".patch_width: horizontal patch wider than the ring side");
  }
  if (a.rows > 1 && a.patch_width > 0.5 * (s.outer_width - s.outer_gap))
  {
    v.push_back(prefix + ".patch_width: vertical patch wider than the gapped ring arm");
  }
  return v;
}

std::vector<std::string> validate_spec(const PairSpec &p)
{
  std::vector<std::string> v = validate(p.ris1, "ris1");
  auto v2 = validate(p.ris2, "ris2");
  v.insert(v.end(), v2.begin(), v2.end());
  if (!(p.separation > 0.0))
  {
    v.push_back("separation: must be > 0 (got " + fmt_num(p.separation) + ")");
  }
  else
  {
    const double depth = 0.5 * (p.ris1.cell.substrate.thickness + p.ris2.cell.substrate.thickness) +
                         p.ris1.cell.srr.metal_thickness + p.ris2.cell.srr.metal_thickness;
    if (!(p.separation > depth))
    {
      v.push_back("separation: RIS volumes overlap (separation " + fmt_num(p.separation) +
                  " must exceed combined half-depth " + fmt_num(depth) + ")");
    }
  }
  if (p.ris1.role != PortRole::Active)
  {
    v.push_back("ris1.role: RIS1 must be active");
  }
  if (p.ris2.role != PortRole::Passive)
  {
    v.push_back("ris2.role: RIS2 must be passive");
  }
  return v;
}

Scene build_array(const ArraySpec &a, const Vec3 &o, Facing facing, int first_port_index,
                  const std::string &prefix)
{
  Scene scene;
  const UnitCellSpec &cell = a.cell;
  const SubstrateSpec &sub = cell.substrate;
  const SrrSpec &srr = cell.srr;
  const double out = facing == Facing::PlusZ ? 1.0 : -1.0;
  const double z_front = o.z + out * 0.5 * sub.thickness;
  const double z_back = o.z - out * 0.5 * sub.thickness;

  const double sw = (a.cols - 1) * a.pitch + sub.width;
  const double sl = (a.rows - 1) * a.pitch + sub.length;
  scene.primitives.push_back(
      {Box::from_corners({o.x - 0.5 * sw, o.y - 0.5 * sl, o.z - 0.5 * sub.thickness},
                         {o.x + 0.5 * sw, o.y + 0.5 * sl, o.z + 0.5 * sub.thickness}),
       Material::dielectric(sub.eps_r, sub.tan_delta), Part::Substrate, prefix + "substrate"});
  if (sub.has_groundplane)
  {
    scene.primitives.push_back({sheet_or_slab(o.x - 0.5 * sw, o.x + 0.5 * sw, o.y - 0.5 * sl,
                                              o.y + 0.5 * sl, z_back, -out * srr.metal_thickness),
                                Material::conductor(), Part::Groundplane,
                                prefix + "groundplane"});
  }

  const bool single = a.rows == 1 && a.cols == 1;
  int port = first_port_index;
  for (int r = 0; r < a.rows; ++r)
  {
    for (int c = 0; c < a.cols; ++c)
    {
      const CellFrame f{cell_x(a, o, c), cell_y(a, o, r), z_front, out};
      const std::string tag =
          single ? prefix : prefix + "cell(" + std::to_string(r) + "," + std::to_string(c) + ")/";
      add_cell_metal(scene, cell, f, tag);
      scene.lumped_items.push_back(cell_port(cell, f, tag + "port", a.role, port++));
    }
  }

  // Load patches. Horizontal neighbours join at the midpoints of the facing side edges.
  // Vertical neighbours cannot join at the midpoint of the lower cell's top edge because the
  // port gap sits there; they attach at the midpoint of the left arm of that edge instead.
  const double hw = 0.5 * a.patch_width;
  for (int r = 0; r < a.rows; ++r)
  {
    for (int c = 0; c + 1 < a.cols; ++c)
    {
      const double y = cell_y(a, o, r);
      const double x0 = cell_x(a, o, c) + 0.5 * srr.outer_width;
      const double x1 = cell_x(a, o, c + 1) - 0.5 * srr.outer_width;
      scene.primitives.push_back({sheet_or_slab(x0, x1, y - hw, y + hw, z_front,
                                                a.patch_thickness * out),
                                  Material::conductor(), Part::LoadPatch,
                                  prefix + "patch_h(" + std::to_string(r) + "," +
                                      std::to_string(c) + ")"});
    }
  }
  for (int r = 0; r + 1 < a.rows; ++r)
  {
    for (int c = 0; c < a.cols; ++c)
    {
      const double x = cell_x(a, o, c) - 0.25 * (srr.outer_width + srr.outer_gap);
      const double y0 = cell_y(a, o, r + 1) + 0.5 * srr.outer_length;
      const double y1 = cell_y(a, o, r) - 0.5 * srr.outer_length;
      scene.primitives.push_back({sheet_or_slab(x - hw, x + hw, y0, y1, z_front,
                                                a.patch_thickness * out),
                                  Material::conductor(), Part::LoadPatch,
                                  prefix + "patch_v(" + std::to_string(r) + "," +
                                      std::to_string(c) + ")"});
    }
  }
  scene.finalize();
  return scene;
}

Scene build_unit_cell(const UnitCellSpec &spec, const Vec3 &origin, Facing facing,
                      PortRole role)
{
  require_valid(validate(spec));
  ArraySpec a;
  a.cell = spec;
  a.rows = a.cols = 1;
  a.role = role;
  return build_array(a, origin, facing, 0, "");
}

Scene build_pair(const PairSpec &spec)
{
  require_valid(validate_spec(spec));
  const double h = 0.5 * spec.separation;
  Scene scene = build_array(spec.ris1, {0.0, 0.0, -h}, Facing::PlusZ, 0, "ris1/");
  const int n1 = spec.ris1.rows * spec.ris1.cols;
  scene.append(build_array(spec.ris2, {0.0, 0.0, h}, Facing::MinusZ, n1, "ris2/"));
  return scene;
}

Scene translated(const Scene &scene, const Vec3 &d)
{
  Scene out = scene;
  for (auto &p : out.primitives)
  {
    p.box = p.box.translated(d);
  }
  for (auto &l : out.lumped_items)
  {
    l.start = l.start + d;
  }
  out.finalize();
  return out;
}

}  // namespace ris

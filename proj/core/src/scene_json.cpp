// Copyright 2026 The rissim Authors
// SPDX-License-Identifier: Apache-2.0

#include <string>

#include "ris/error.hpp"
#include "ris/scene.hpp"

namespace ris
{

namespace
{

constexpr int kSceneSchemaVersion = 1;

using nlohmann::json;

json vec(const Vec3 &v) { return json::array({v.x, v.y, v.z}); }

Vec3 vec_from(const json &j) { return {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>()}; }

const char *part_name(Part p)
{
  switch (p)
  {
    case Part::Substrate:
      return "substrate";
    case Part::Groundplane:
      return "groundplane";
    case Part::Ring:
      return "ring";
    case Part::LoadPatch:
      return "load_patch";
    case Part::Other:
      return "other";
  }
  return "other";
}

Part part_from(const std::string &s)
{
  if (s == "substrate")
    return Part::Substrate;
  if (s == "groundplane")
    return Part::Groundplane;
  if (s == "ring")
    return Part::Ring;
  if (s == "load_patch")
    return Part::LoadPatch;
  return Part::Other;
}

json material_json(const Material &m)
{
  switch (m.kind)
  {
    case Material::Kind::Air:
      return {{"kind", "air"}};
    case Material::Kind::Conductor:
      return {{"kind", "conductor"}};
    case Material::Kind::Dielectric:
      return {{"kind", "dielectric"}, {"eps_r", m.eps_r}, {"tan_delta", m.tan_delta}};
  }
  return {};
}

Material material_from(const json &j)
{
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "air")
    return Material::air();
  if (kind == "conductor")
    return Material::conductor();
  if (kind == "dielectric")
    return Material::dielectric(j.at("eps_r").get<double>(), j.at("tan_delta").get<double>());
  throw Error("scene json: unknown material kind '" + kind + "'");
}

const char *kind_name(LumpedKind k)
{
  switch (k)
  {
    case LumpedKind::Port:
      return "port";
    case LumpedKind::Load:
      return "load";
    case LumpedKind::Probe:
      return "probe";
  }
  return "port";
}

LumpedKind kind_from(const std::string &s)
{
  if (s == "port")
    return LumpedKind::Port;
  if (s == "load")
    return LumpedKind::Load;
  if (s == "probe")
    return LumpedKind::Probe;
  throw Error("scene json: unknown lumped kind '" + s + "'");
}

Axis axis_from(const std::string &s)
{
  if (s == "x")
    return Axis::X;
  if (s == "y")
    return Axis::Y;
  if (s == "z")
    return Axis::Z;
  throw Error("scene json: unknown axis '" + s + "'");
}

}  // namespace

json to_json(const Scene &scene)
{
  json prims = json::array();
  for (const auto &p : scene.primitives)
  {
    prims.push_back({{"label", p.label},
                     {"part", part_name(p.part)},
                     {"material", material_json(p.material)},
                     {"lo", vec(p.box.lo)},
                     {"hi", vec(p.box.hi)}});
  }
  json items = json::array();
  for (const auto &l : scene.lumped_items)
  {
    json series = {{"resistance", l.series.resistance}, {"inductance", l.series.inductance}};
    series["capacitance"] = l.series.capacitance ? json(*l.series.capacitance) : json(nullptr);
    items.push_back({{"label", l.label},
                     {"kind", kind_name(l.kind)},
                     {"start", vec(l.start)},
                     {"axis", axis_name(l.axis)},
                     {"length", l.length},
                     {"port_resistance", l.port_resistance},
                     {"series", series},
                     {"role", l.role == PortRole::Active ? "active" : "passive"},
                     {"port_index", l.port_index}});
  }
  return {{"schema", "ris.scene"},
          {"version", kSceneSchemaVersion},
          {"primitives", prims},
          {"lumped_items", items},
          {"fixed_lines",
           {{"x", scene.fixed_lines[0]}, {"y", scene.fixed_lines[1]}, {"z", scene.fixed_lines[2]}}},
          {"bounds", {{"lo", vec(scene.bounds.lo)}, {"hi", vec(scene.bounds.hi)}}}};
}

Scene scene_from_json(const json &j)
{
  if (j.value("schema", "") != "ris.scene")
  {
    throw Error("scene json: missing or wrong schema tag");
  }
  if (j.value("version", 0) != kSceneSchemaVersion)
  {
    throw Error("scene json: unsupported version");
  }
  Scene scene;
  for (const auto &p : j.at("primitives"))
  {
    scene.primitives.push_back({{vec_from(p.at("lo")), vec_from(p.at("hi"))},
                                material_from(p.at("material")),
                                part_from(p.value("part", "other")),
                                p.value("label", "")});
  }
  for (const auto &l : j.at("lumped_items"))
  {
    LumpedItem item;
    item.label = l.value("label", "");
    item.kind = kind_from(l.at("kind").get<std::string>());
    item.start = vec_from(l.at("start"));
    item.axis = axis_from(l.at("axis").get<std::string>());
    item.length = l.at("length").get<double>();
    item.port_resistance = l.value("port_resistance", 50.0);
    if (l.contains("series"))
    {
      const auto &s = l.at("series");
      item.series.resistance = s.value("resistance", 0.0);
      item.series.inductance = s.value("inductance", 0.0);
      if (s.contains("capacitance") && !s.at("capacitance").is_null())
      {
        item.series.capacitance = s.at("capacitance").get<double>();
      }
    }
    item.role = l.value("role", "passive") == "active" ? PortRole::Active : PortRole::Passive;
    item.port_index = l.value("port_index", -1);
    scene.lumped_items.push_back(std::move(item));
  }
  scene.finalize();
  return scene;
}

}  // namespace ris

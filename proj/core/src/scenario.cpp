// Copyright 2026 The rissim Authors
// SPDX-License-Identifier: Apache-2.0

#include "ris/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "ris/error.hpp"
#include "ris/io_util.hpp"

namespace ris
{

namespace
{

using nlohmann::json;

// Gap between two neighbouring S-SRRs when the pitch is given as edge-to-edge spacing.
double footprint(const SrrSpec &s) { return std::max(s.outer_width, s.outer_length); }

// Reads an object while remembering which keys were used, so leftovers can be reported.
class Reader
{
public:
  Reader(const json &j, std::string path, std::vector<std::string> &errors)
      : j_(j), path_(std::move(path)), errors_(errors)
  {
    if (!j_.is_object())
      errors_.push_back(where() + ": expected an object");
  }
  ~Reader()
  {
    if (!j_.is_object())
      return;
    for (const auto &[k, v] : j_.items())
      if (!used_.count(k))
        errors_.push_back("unknown key '" + child(k) + "'");
  }
  Reader(const Reader &) = delete;
  Reader &operator=(const Reader &) = delete;

  bool has(const std::string &k)
  {
    if (!j_.is_object() || !j_.contains(k))
      return false;
    used_.insert(k);
    return true;
  }
  const json &at(const std::string &k) { return j_.at(k); }
  std::string child(const std::string &k) const { return path_.empty() ? k : path_ + "." + k; }

  template <class T>
  void get(const std::string &k, T &out)
  {
    if (!has(k))
      return;
    try
    {
      out = j_.at(k).get<T>();
    }
    catch (const json::exception &)
    {
      errors_.push_back(child(k) + ": wrong type");
    }
  }
  template <class T>
  void get(const std::string &k, std::optional<T> &out)
  {
    if (!has(k) || j_.at(k).is_null())
      return;
    try
    {
      out = j_.at(k).get<T>();
    }
    catch (const json::exception &)
    {
      errors_.push_back(child(k) + ": wrong type");
    }
  }

private:
  std::string where() const { return path_.empty() ? "scenario" : path_; }
  const json &j_;
  std::string path_;
  std::vector<std::string> &errors_;
  std::set<std::string> used_;
};

void read_srr(Reader &r, SrrSpec &s)
{
  r.get("outer_length_mm", s.outer_length);
  r.get("outer_width_mm", s.outer_width);
  r.get("outer_gap_mm", s.outer_gap);
  r.get("inner_gap_mm", s.inner_gap);
  r.get("outer_trace_width_mm", s.outer_trace_width);
  r.get("inner_trace_width_mm", s.inner_trace_width);
  r.get("ring_separation_mm", s.ring_separation);
  r.get("metal_thickness_mm", s.metal_thickness);
}

void read_substrate(Reader &r, SubstrateSpec &s)
{
  r.get("width_mm", s.width);
  r.get("length_mm", s.length);
  r.get("thickness_mm", s.thickness);
  r.get("eps_r", s.eps_r);
  r.get("tan_delta", s.tan_delta);
  r.get("groundplane", s.has_groundplane);
}

void read_rlc(Reader &r, SeriesRlc &s)
{
  r.get("resistance_ohm", s.resistance);
  r.get("inductance_h", s.inductance);
  r.get("capacitance_f", s.capacitance);
}

void read_cell(Reader &r, UnitCellSpec &c, std::vector<std::string> &errors)
{
  if (r.has("srr"))
  {
    Reader s(r.at("srr"), r.child("srr"), errors);
    read_srr(s, c.srr);
  }
  if (r.has("substrate"))
  {
    Reader s(r.at("substrate"), r.child("substrate"), errors);
    read_substrate(s, c.substrate);
  }
  r.get("port_resistance_ohm", c.port_resistance);
  if (r.has("lumped_state"))
  {
    Reader s(r.at("lumped_state"), r.child("lumped_state"), errors);
    read_rlc(s, c.lumped_state);
  }
}

void read_pair(Reader &r, PairSpec &p, std::vector<std::string> &errors)
{
  ArraySpec a = p.ris1;
  r.get("rows", a.rows);
  r.get("cols", a.cols);
  r.get("patch_width_mm", a.patch_width);
  r.get("patch_thickness_mm", a.patch_thickness);
  if (r.has("cell"))
  {
    Reader c(r.at("cell"), r.child("cell"), errors);
    read_cell(c, a.cell, errors);
  }
  std::optional<double> pitch, spacing;
  r.get("pitch_mm", pitch);
  r.get("srr_spacing_mm", spacing);
  if (pitch && spacing)
    errors.push_back(r.child("pitch_mm") + ": give either pitch_mm or srr_spacing_mm, not both");
  if (pitch)
    a.pitch = *pitch;
  else if (spacing)
    a.pitch = footprint(a.cell.srr) + *spacing;
  else
    a.pitch = footprint(a.cell.srr) + 10.0;
  r.get("separation_mm", p.separation);
  p.ris1 = a;
  p.ris1.role = PortRole::Active;
  p.ris2 = a;
  p.ris2.role = PortRole::Passive;
}

std::string locate(const std::string &text, std::size_t byte)
{
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i)
  {
    if (text[i] == '\n')
    {
      ++line;
      col = 1;
    }
    else
    {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

std::string dotted_pointer(const std::string &path)
{
  std::string pointer = "/" + path;
  std::replace(pointer.begin(), pointer.end(), '.', '/');
  return pointer;
}

bool numeric_key(const json &doc, const std::string &path)
{
  try
  {
    const json::json_pointer ptr(dotted_pointer(path));
    return doc.contains(ptr) && doc.at(ptr).is_number();
  }
  catch (const json::exception &)
  {
    return false;
  }
}

}  // namespace

std::vector<int> Scenario::excitation_ports() const
{
  if (!active_ports.empty())
  {
    auto v = active_ports;
    std::sort(v.begin(), v.end());
    return v;
  }
  std::vector<int> v(static_cast<std::size_t>(pair.ris1.rows * pair.ris1.cols));
  for (std::size_t i = 0; i < v.size(); ++i)
    v[i] = static_cast<int>(i);
  return v;
}

std::vector<int> Scenario::passive_ports() const
{
  const int n1 = pair.ris1.rows * pair.ris1.cols;
  const int n2 = pair.ris2.rows * pair.ris2.cols;
  std::vector<int> v;
  for (int i = 0; i < n2; ++i)
    v.push_back(n1 + i);
  return v;
}

std::vector<std::string> validate(const Scenario &s)
{
  auto v = validate_spec(s.pair);
  auto add = [&](std::vector<std::string> w) { v.insert(v.end(), w.begin(), w.end()); };
  add(validate(s.source));
  add(validate(s.mesh));
  add(validate(s.run));
  add(validate(s.analysis.grid));
  if (!(s.analysis.z0 > 0.0))
    v.emplace_back("analysis.z0_ohm: must be > 0");
  if (!(s.analysis.threshold_db < 0.0))
    v.emplace_back("analysis.bandwidth_threshold_db: must be < 0");
  const double ff = s.fitness_frequency();
  if (!(ff >= s.analysis.grid.f_start && ff <= s.analysis.grid.f_stop))
    v.emplace_back("analysis.fitness_frequency_hz: must lie within the analysis grid");
  const int n1 = s.pair.ris1.rows * s.pair.ris1.cols;
  std::set<int> seen;
  for (int p : s.active_ports)
  {
    if (p < 0 || p >= n1)
      v.push_back("run.active_ports: " + std::to_string(p) + " is not a RIS1 port");
    if (!seen.insert(p).second)
      v.push_back("run.active_ports: duplicate port " + std::to_string(p));
  }
  if (s.parameters)
  {
    add(validate(*s.parameters));
    const json doc = to_json(s);
    for (const auto &e : s.parameters->entries)
    {
      const int n = 2 * n1;
      if (e.kind != ParamKind::Geometry && (e.port < -1 || e.port >= n))
        v.push_back("parameters." + e.name + ": port out of range");
      if (e.kind == ParamKind::Geometry && !numeric_key(doc, e.field))
        v.push_back("parameters." + e.name + ".field: '" + e.field + "' is not a numeric scenario key");
    }
  }
  if (s.optimizer)
    add(validate(*s.optimizer));
  if (s.optimizer && !s.parameters)
    v.emplace_back("optimizer: requires a parameters list");
  if (s.output_dir.empty())
    v.emplace_back("output_dir: must not be empty");
  return v;
}

Scenario scenario_from_json(const json &j)
{
  std::vector<std::string> errors;
  Scenario s;
  {
    Reader r(j, "", errors);
    std::string schema = "ris.scenario";
    int version = 1;
    r.get("schema", schema);
    r.get("version", version);
    if (schema != "ris.scenario")
      errors.push_back("schema: expected 'ris.scenario'");
    if (version != 1)
      errors.push_back("version: unsupported scenario version");
    r.get("name", s.name);
    r.get("output_dir", s.output_dir);
    if (r.has("pair"))
    {
      Reader p(r.at("pair"), "pair", errors);
      read_pair(p, s.pair, errors);
    }
    if (r.has("source"))
    {
      Reader p(r.at("source"), "source", errors);
      p.get("f0_hz", s.source.f0);
      p.get("fc_hz", s.source.fc);
      p.get("amplitude_v", s.source.amplitude);
    }
    bool pad_set = false, fine_set = false, coarse_set = false;
    if (r.has("mesh"))
    {
      Reader p(r.at("mesh"), "mesh", errors);
      pad_set = p.has("air_padding_mm");
      fine_set = p.has("fine_resolution_mm");
      coarse_set = p.has("coarse_resolution_mm");
      p.get("fine_resolution_mm", s.mesh.fine_resolution);
      p.get("coarse_resolution_mm", s.mesh.coarse_resolution);
      p.get("merge_threshold_mm", s.mesh.merge_threshold);
      p.get("pml_cells", s.mesh.pml_cells);
      p.get("air_padding_mm", s.mesh.air_padding);
      p.get("edge_refinement", s.mesh.edge_refinement);
      p.get("max_grading", s.mesh.max_grading);
    }
    {
      // rule-of-thumb values for whatever the file leaves out
      const double eps_max = std::max(s.pair.ris1.cell.substrate.eps_r, s.pair.ris2.cell.substrate.eps_r);
      const auto d = MeshSpec::defaults_for(s.source.f0, s.source.fc, eps_max);
      if (!pad_set)
        s.mesh.air_padding = d.air_padding;
      if (!fine_set)
        s.mesh.fine_resolution = coarse_set ? std::min(d.fine_resolution, s.mesh.coarse_resolution) : d.fine_resolution;
      if (!coarse_set)
        s.mesh.coarse_resolution = std::max(d.coarse_resolution, s.mesh.fine_resolution);
    }
    if (r.has("run"))
    {
      Reader p(r.at("run"), "run", errors);
      p.get("cfl_factor", s.run.cfl_factor);
      p.get("max_timesteps", s.run.max_timesteps);
      p.get("energy_stop_db", s.run.energy_stop_db);
      p.get("workers", s.run.workers);
      p.get("pml_reflection", s.run.pml_reflection);
      p.get("pml_grading_order", s.run.pml_grading_order);
      p.get("active_ports", s.active_ports);
    }
    if (r.has("analysis"))
    {
      Reader p(r.at("analysis"), "analysis", errors);
      p.get("f_start_hz", s.analysis.grid.f_start);
      p.get("f_stop_hz", s.analysis.grid.f_stop);
      p.get("n_points", s.analysis.grid.n_points);
      p.get("z0_ohm", s.analysis.z0);
      p.get("bandwidth_threshold_db", s.analysis.threshold_db);
      p.get("fitness_frequency_hz", s.analysis.fitness_frequency);
    }
    if (r.has("parameters"))
    {
      Parameterization par;
      const auto &arr = r.at("parameters");
      if (!arr.is_array())
        errors.emplace_back("parameters: expected an array");
      else
        for (std::size_t i = 0; i < arr.size(); ++i)
        {
          Reader p(arr[i], "parameters[" + std::to_string(i) + "]", errors);
          ParamEntry e;
          std::string kind = "lumped-C";
          p.get("name", e.name);
          p.get("kind", kind);
          p.get("port", e.port);
          p.get("field", e.field);
          p.get("lower", e.lower);
          p.get("upper", e.upper);
          p.get("unit", e.unit);
          try
          {
            e.kind = param_kind_from(kind);
          }
          catch (const Error &ex)
          {
            errors.push_back(p.child("kind") + ": " + ex.what());
          }
          par.entries.push_back(e);
        }
      s.parameters = par;
    }
    if (r.has("optimizer"))
    {
      Reader p(r.at("optimizer"), "optimizer", errors);
      OptimizerConfig c;
      p.get("algorithm", c.algorithm);
      p.get("population", c.population);
      p.get("f_weight", c.f_weight);
      p.get("crossover", c.crossover);
      p.get("max_evaluations", c.max_evaluations);
      p.get("target_fitness", c.target_fitness);
      p.get("time_budget_s", c.time_budget_s);
      p.get("seed", c.seed);
      p.get("workers", c.workers);
      p.get("initial_population", c.initial_population);
      s.optimizer = c;
    }
  }
  if (errors.empty())
    errors = validate(s);
  if (!errors.empty())
    throw ValidationError(std::move(errors));
  return s;
}

Scenario parse_scenario(const std::string &text)
{
  json j;
  try
  {
    j = json::parse(text);
  }
  catch (const json::parse_error &e)
  {
    throw Error("scenario parse error at " + locate(text, e.byte) + ": " + e.what());
  }
  return scenario_from_json(j);
}

Scenario load_scenario(const std::filesystem::path &path)
{
  std::ifstream in(path);
  if (!in)
    throw Error("cannot open scenario file '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

json to_json(const Scenario &s)
{
  const auto &a = s.pair.ris1;
  const auto &c = a.cell;
  json rlc = {{"resistance_ohm", c.lumped_state.resistance}, {"inductance_h", c.lumped_state.inductance}};
  rlc["capacitance_f"] = c.lumped_state.capacitance ? json(*c.lumped_state.capacitance) : json(nullptr);
  json j = {
      {"schema", "ris.scenario"},
      {"version", 1},
      {"name", s.name},
      {"output_dir", s.output_dir},
      {"pair",
       {{"rows", a.rows},
        {"cols", a.cols},
        {"pitch_mm", a.pitch},
        {"patch_width_mm", a.patch_width},
        {"patch_thickness_mm", a.patch_thickness},
        {"separation_mm", s.pair.separation},
        {"cell",
         {{"srr",
           {{"outer_length_mm", c.srr.outer_length},
            {"outer_width_mm", c.srr.outer_width},
            {"outer_gap_mm", c.srr.outer_gap},
            {"inner_gap_mm", c.srr.inner_gap},
            {"outer_trace_width_mm", c.srr.outer_trace_width},
            {"inner_trace_width_mm", c.srr.inner_trace_width},
            {"ring_separation_mm", c.srr.ring_separation},
            {"metal_thickness_mm", c.srr.metal_thickness}}},
          {"substrate",
           {{"width_mm", c.substrate.width},
            {"length_mm", c.substrate.length},
            {"thickness_mm", c.substrate.thickness},
            {"eps_r", c.substrate.eps_r},
            {"tan_delta", c.substrate.tan_delta},
            {"groundplane", c.substrate.has_groundplane}}},
          {"port_resistance_ohm", c.port_resistance},
          {"lumped_state", rlc}}}}},
      {"source", {{"f0_hz", s.source.f0}, {"fc_hz", s.source.fc}, {"amplitude_v", s.source.amplitude}}},
      {"mesh",
       {{"fine_resolution_mm", s.mesh.fine_resolution},
        {"coarse_resolution_mm", s.mesh.coarse_resolution},
        {"merge_threshold_mm", s.mesh.merge_threshold ? json(*s.mesh.merge_threshold) : json(nullptr)},
        {"pml_cells", s.mesh.pml_cells},
        {"air_padding_mm", s.mesh.air_padding},
        {"edge_refinement", s.mesh.edge_refinement},
        {"max_grading", s.mesh.max_grading}}},
      {"run",
       {{"cfl_factor", s.run.cfl_factor},
        {"max_timesteps", s.run.max_timesteps},
        {"energy_stop_db", s.run.energy_stop_db},
        {"workers", s.run.workers},
        {"pml_reflection", s.run.pml_reflection},
        {"pml_grading_order", s.run.pml_grading_order},
        {"active_ports", s.active_ports}}},
      {"analysis",
       {{"f_start_hz", s.analysis.grid.f_start},
        {"f_stop_hz", s.analysis.grid.f_stop},
        {"n_points", s.analysis.grid.n_points},
        {"z0_ohm", s.analysis.z0},
        {"bandwidth_threshold_db", s.analysis.threshold_db},
        {"fitness_frequency_hz",
         s.analysis.fitness_frequency ? json(*s.analysis.fitness_frequency) : json(nullptr)}}}};
  if (s.parameters)
    j["parameters"] = to_json(*s.parameters);
  if (s.optimizer)
  {
    const auto &o = *s.optimizer;
    j["optimizer"] = {{"algorithm", o.algorithm},
                      {"population", o.population},
                      {"f_weight", o.f_weight},
                      {"crossover", o.crossover},
                      {"max_evaluations", o.max_evaluations},
                      {"target_fitness", o.target_fitness ? json(*o.target_fitness) : json(nullptr)},
                      {"time_budget_s", o.time_budget_s ? json(*o.time_budget_s) : json(nullptr)},
                      {"seed", o.seed},
                      {"workers", o.workers},
                      {"initial_population", o.initial_population}};
  }
  return j;
}

std::string config_hash(const Scenario &s)
{
  json j = to_json(s);
  j.erase("name");
  j.erase("output_dir");
  // Worker counts never change results.
  j["run"].erase("workers");
  if (j.contains("optimizer"))
    j["optimizer"].erase("workers");
  return hex64(fnv1a64(j.dump()));
}

Scenario with_field(const Scenario &s, const std::string &path, double value)
{
  json j = to_json(s);
  if (!numeric_key(j, path))
    throw Error("unknown numeric scenario field '" + path + "'");
  const json::json_pointer ptr(dotted_pointer(path));
  j[ptr] = value;
  return scenario_from_json(j);
}

}  // namespace ris

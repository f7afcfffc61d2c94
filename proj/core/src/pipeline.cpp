// Copyright 2026 The rissim Authors
// SPDX-License-Identifier: Apache-2.0

#include "ris/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

#include "ris/error.hpp"
#include "ris/io_util.hpp"
#include "ris/version.hpp"

namespace ris
{

namespace
{

constexpr int kLargeArrayCells = 25;

void say(const LogFn &log, const std::string &msg)
{
  if (log)
    log(msg);
}

std::string fmt_double(double v, int precision = 6)
{
  std::ostringstream os;
  os.precision(precision);
  os << v;
  return os.str();
}

nlohmann::json coupling_json(const SParamMatrix &s, int src, const std::vector<int> &passive)
{
  nlohmann::json out = nlohmann::json::array();
  for (int dst : passive)
  {
    const auto c = find_max_coupling(s, src, dst);
    out.push_back({{"to_port", dst},
                   {"frequency_hz", c.frequency},
                   {"magnitude", c.magnitude},
                   {"magnitude_db", c.magnitude > 0.0 ? 20.0 * std::log10(c.magnitude) : -300.0},
                   {"no_coupling", c.no_coupling}});
  }
  return out;
}

}  // namespace

nlohmann::json CostEstimate::to_json() const
{
  return {{"cells", cells},
          {"dt_s", dt},
          {"steps_per_run_estimate", steps},
          {"runs", runs},
          {"seconds_estimate", seconds},
          {"memory_bytes_estimate", memory_bytes}};
}

PreparedModel prepare_model(const Scenario &s)
{
  if (auto v = validate(s); !v.empty())
    throw ValidationError(std::move(v));
  PreparedModel m;
  m.scene = build_pair(s.pair);
  m.mesh = generate_mesh(m.scene, s.mesh);
  m.grid = rasterize(m.scene, m.mesh, s.source.f0);
  return m;
}

CostEstimate estimate_cost(const Scenario &s, const PreparedModel &m)
{
  CostEstimate c;
  c.cells = m.mesh.cell_count();
  c.dt = stable_timestep(m.mesh, m.grid, s.run.cfl_factor);
  // Source duration plus a ring-down of similar length.
  c.steps = std::min<long>(s.run.max_timesteps, static_cast<long>(std::ceil(2.5 * s.source.end_time() / c.dt)));
  c.runs = static_cast<int>(s.excitation_ports().size());
  c.seconds = static_cast<double>(c.cells) * static_cast<double>(c.steps) * c.runs / CostEstimate::kNominalCellsPerSecond;
  c.memory_bytes = static_cast<double>(c.cells) * (6 * 8 + 3 * 2);
  return c;
}

PairResult simulate(const Scenario &s, const PreparedModel &m, const LogFn &log, bool keep_records)
{
  PairResult r;
  r.active = s.excitation_ports();
  r.passive = s.passive_ports();
  const int n_ports = static_cast<int>(m.scene.port_count());
  for (int p : r.active)
  {
    say(log, "excitation run: port " + std::to_string(p));
    SimRecord rec = run_simulation(m.grid, m.mesh, p, s.source, s.run);
    std::ostringstream msg;
    msg << "  steps " << rec.steps << ", stop " << to_string(rec.stop_reason) << ", wall "
        << fmt_double(rec.wall_seconds, 4) << " s, " << fmt_double(rec.cells_per_second / 1e6, 4)
        << " Mcells/s";
    say(log, msg.str());
    r.run_log.push_back({{"active_port", p},
                         {"steps", rec.steps},
                         {"dt_s", rec.dt},
                         {"stop_reason", to_string(rec.stop_reason)},
                         {"wall_seconds", rec.wall_seconds},
                         {"cells_per_second", rec.cells_per_second}});
    if (rec.stop_reason == StopReason::Diverged)
    {
      r.diverged = true;
      r.diagnostics.push_back("run for port " + std::to_string(p) + " diverged after " +
                              std::to_string(rec.steps) + " steps");
    }
    r.spectra.push_back(port_spectra(rec, s.analysis.grid));
    if (keep_records)
      r.records.push_back(std::move(rec));
  }
  r.s = scattering_matrix(r.spectra, n_ports, s.analysis.z0);
  for (std::size_t k = 0; k < r.active.size(); ++k)
  {
    const int p = r.active[k];
    r.resonance.push_back(find_resonance(r.s, p, s.analysis.threshold_db));
    r.impedance.push_back(feed_impedance(r.spectra[k], p));
    r.powers.push_back(port_powers(r.spectra[k], s.analysis.z0));
  }
  r.fitness = r.diverged ? -std::numeric_limits<double>::infinity()
                         : default_fitness(r.s, s.fitness_frequency(), r.active, r.passive);
  return r;
}

void apply_lumped(MaterialGrid &grid, const Parameterization &p, const std::vector<double> &x)
{
  for (std::size_t d = 0; d < p.size(); ++d)
  {
    const auto &e = p.entries[d];
    if (e.kind == ParamKind::Geometry)
      continue;
    for (auto &el : grid.lumped)
    {
      if (el.kind != LumpedKind::Port || (e.port >= 0 && el.port_index != e.port))
        continue;
      switch (e.kind)
      {
        case ParamKind::LumpedR:
          el.series.resistance = x[d];
          break;
        case ParamKind::LumpedL:
          el.series.inductance = x[d];
          break;
        case ParamKind::LumpedC:
          el.series.capacitance = x[d];
          break;
        case ParamKind::Geometry:
          break;
      }
    }
  }
}

Scenario apply_geometry(const Scenario &s, const Parameterization &p, const std::vector<double> &x)
{
  Scenario out = s;
  for (std::size_t d = 0; d < p.size(); ++d)
    if (p.entries[d].kind == ParamKind::Geometry)
      out = with_field(out, p.entries[d].field, x[d]);
  return out;
}

double evaluate_candidate(const std::vector<double> &x, const Scenario &s, const Parameterization &p,
                          const PreparedModel *reuse, std::string *diagnostic)
{
  if (x.size() != p.size())
    throw Error("evaluate_candidate: parameter vector has wrong length");
  for (std::size_t d = 0; d < p.size(); ++d)
    if (x[d] < p.entries[d].lower || x[d] > p.entries[d].upper)
      throw Error("evaluate_candidate: parameter '" + p.entries[d].name + "' out of bounds");
  try
  {
    Scenario sc = p.geometry() ? apply_geometry(s, p, x) : s;
    PreparedModel local;
    const PreparedModel *base = reuse;
    if (p.geometry() || base == nullptr)
    {
      local = prepare_model(sc);
      base = &local;
    }
    PreparedModel model_copy;
    model_copy.scene = base->scene;
    model_copy.mesh = base->mesh;
    model_copy.grid = base->grid;
    apply_lumped(model_copy.grid, p, x);
    const auto r = simulate(sc, model_copy, {}, false);
    if (r.diverged && diagnostic)
      *diagnostic = r.diagnostics.empty() ? "diverged" : r.diagnostics.front();
    return r.fitness;
  }
  catch (const ValidationError &e)
  {
    if (diagnostic)
      *diagnostic = e.what();
    return -std::numeric_limits<double>::infinity();
  }
}

OptResult run_optimization(const Scenario &s, const LogFn &log)
{
  if (!s.parameters || !s.optimizer)
    throw Error("run_optimization: scenario has no parameters/optimizer section");
  const auto &p = *s.parameters;
  std::optional<PreparedModel> reuse;
  if (!p.geometry())
    reuse = prepare_model(s);
  long count = 0;
  FitnessFunction f = [&](const std::vector<double> &x)
  {
    std::string diag;
    const double v = evaluate_candidate(x, s, p, reuse ? &*reuse : nullptr, &diag);
    say(log, "evaluation " + std::to_string(count++) + ": fitness " + fmt_double(v, 8) +
                 (diag.empty() ? "" : " (" + diag + ")"));
    return v;
  };
  return optimize(f, p, *s.optimizer);
}

ArtifactSet run_scenario(const Scenario &s, const RunOptions &opt)
{
  const auto t_start = std::chrono::steady_clock::now();
  ArtifactSet out;
  out.dir = s.output_dir;
  const int cells = s.pair.ris1.rows * s.pair.ris1.cols;
  say(opt.log, "building " + std::to_string(s.pair.ris1.rows) + "x" + std::to_string(s.pair.ris1.cols) +
                   " pair, separation " + fmt_double(s.pair.separation) + " mm");
  PreparedModel model = prepare_model(s);
  const auto report = mesh_report(model.mesh, s.mesh.max_grading);
  out.cost = estimate_cost(s, model);
  say(opt.log, report.to_table());
  say(opt.log, "cost estimate: " + out.cost.to_json().dump());
  if (cells > kLargeArrayCells && !opt.large)
  {
    throw ValidationError({"pair: arrays above 5x5 need the --large flag (estimated " +
                           fmt_double(out.cost.seconds / 3600.0, 3) + " h for " +
                           std::to_string(out.cost.runs) + " excitation runs)"});
  }

  nlohmann::json files = nlohmann::json::array();
  auto write = [&](const std::string &name, const std::string &content)
  {
    write_file_atomic(out.dir / name, content);
    out.files.push_back(name);
    files.push_back({{"name", name}, {"fnv1a64", hex64(fnv1a64(content))}});
  };
  nlohmann::json manifest = {{"schema", "ris.manifest"},
                             {"version", 1},
                             {"rissim_version", kVersion},
                             {"scenario", s.name},
                             {"config_hash", config_hash(s)},
                             {"dry_run", opt.dry_run},
                             {"complete", false}};
  auto flush_manifest = [&]
  {
    manifest["files"] = files;
    manifest["cost_estimate"] = out.cost.to_json();
    manifest["total_wall_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    write_file_atomic(out.dir / "manifest.json", manifest.dump(2) + "\n");
    out.manifest = manifest;
  };

  write("scenario.json", to_json(s).dump(2) + "\n");
  write("mesh_report.json", report.to_json().dump(2) + "\n");
  write("mesh_report.txt", report.to_table());
  if (opt.dry_run)
  {
    manifest["complete"] = true;
    out.complete = true;
    flush_manifest();
    return out;
  }
  write("scene.json", to_json(model.scene).dump(1) + "\n");
  flush_manifest();

  try
  {
    PairResult r = simulate(s, model, opt.log, true);
    manifest["runs"] = r.run_log;
    manifest["diverged"] = r.diverged;
    manifest["diagnostics"] = r.diagnostics;
    {
      std::ostringstream ts;
      write_touchstone(r.s, ts);
      write("s_matrix.s" + std::to_string(r.s.n_ports) + "p", ts.str());
      std::ostringstream cs;
      write_sparam_csv(r.s, cs);
      write("s_matrix.csv", cs.str());
    }
    {
      std::ostringstream zs;
      zs << "f_hz,port,re_ohm,im_ohm,defined\n";
      zs.precision(12);
      for (std::size_t k = 0; k < r.active.size(); ++k)
      {
        const auto &z = r.impedance[k];
        for (std::size_t f = 0; f < z.z.size(); ++f)
        {
          zs << s.analysis.grid.at(f) << ',' << r.active[k] << ',';
          if (z.defined[f])
            zs << z.z[f].real() << ',' << z.z[f].imag() << ",1\n";
          else
            zs << ",,0\n";
        }
      }
      write("impedance.csv", zs.str());
    }
    {
      std::ostringstream ps;
      ps << "active_port,f_hz,port,incoming_w,reflected_w,accepted_w\n";
      ps.precision(12);
      for (const auto &p : r.powers)
        for (std::size_t slot = 0; slot < p.port_indices.size(); ++slot)
          for (std::size_t f = 0; f < p.incoming[slot].size(); ++f)
            ps << p.active_port << ',' << p.grid.at(f) << ',' << p.port_indices[slot] << ','
               << p.incoming[slot][f] << ',' << p.reflected[slot][f] << ',' << p.accepted[slot][f] << '\n';
      write("powers.csv", ps.str());
    }
    {
      nlohmann::json res = {{"schema", "ris.resonance"}, {"version", 1}, {"active_ports", nlohmann::json::array()}};
      for (std::size_t k = 0; k < r.active.size(); ++k)
      {
        auto j = r.resonance[k].to_json();
        j.erase("schema");
        j.erase("version");
        j["max_coupling"] = coupling_json(r.s, r.active[k], r.passive);
        res["active_ports"].push_back(j);
      }
      res["power_transfer_fitness"] = std::isfinite(r.fitness) ? nlohmann::json(r.fitness) : nlohmann::json(nullptr);
      res["fitness_frequency_hz"] = s.fitness_frequency();
      write("resonance.json", res.dump(2) + "\n");
    }
    for (const auto &rec : r.records)
    {
      std::ostringstream ts;
      write_csv(rec, ts);
      write("timeseries_p" + std::to_string(rec.active_port) + ".csv", ts.str());
    }
    r.records.clear();
    out.result = std::move(r);

    if (s.parameters && s.optimizer)
    {
      say(opt.log, "optimization");
      OptResult o = run_optimization(s, opt.log);
      std::ostringstream hs;
      hs << "eval_id";
      for (const auto &e : s.parameters->entries)
        hs << ',' << e.name;
      hs << ",fitness,wall_s\n";
      hs.precision(12);
      for (std::size_t k = 0; k < o.history.size(); ++k)
      {
        hs << k;
        for (double v : o.evaluated[k])
          hs << ',' << v;
        hs << ',' << o.history[k] << ',' << o.eval_seconds[k] << '\n';
      }
      write("optimization_history.csv", hs.str());
      Scenario best = apply_geometry(s, *s.parameters, o.best.x);
      auto j = to_json(best);
      // Lumped values become the shared cell state when they address every port.
      for (std::size_t d = 0; d < s.parameters->size(); ++d)
      {
        const auto &e = s.parameters->entries[d];
        auto &st = j["pair"]["cell"]["lumped_state"];
        if (e.kind == ParamKind::Geometry || e.port >= 0)
          continue;
        if (e.kind == ParamKind::LumpedR)
          st["resistance_ohm"] = o.best.x[d];
        else if (e.kind == ParamKind::LumpedL)
          st["inductance_h"] = o.best.x[d];
        else
          st["capacitance_f"] = o.best.x[d];
      }
      j.erase("parameters");
      j.erase("optimizer");
      j["output_dir"] = s.output_dir + "/best";
      write("best_candidate.json", j.dump(2) + "\n");
      manifest["optimization"] = {{"stop_reason", to_string(o.stop)},
                                  {"evaluations", o.evaluations},
                                  {"best_fitness", o.best.fitness},
                                  {"best_parameters", o.best.x}};
      out.optimization = std::move(o);
    }
    manifest["complete"] = true;
    out.complete = true;
  }
  catch (const std::exception &e)
  {
    manifest["error"] = e.what();
    flush_manifest();
    throw;
  }
  flush_manifest();
  return out;
}

std::vector<SweepRow> distance_sweep(const Scenario &s, const std::vector<double> &distances,
                                     const RunOptions &opt)
{
  if (!std::is_sorted(distances.begin(), distances.end()))
    throw ValidationError({"sweep: distances must be ascending"});
  if (distances.empty())
    say(opt.log, "warning: empty distance list, nothing to sweep");
  std::vector<SweepRow> rows;
  for (double d : distances)
  {
    SweepRow row;
    row.distance = d;
    try
    {
      Scenario sc = s;
      sc.pair.separation = d;
      sc.output_dir = (std::filesystem::path(s.output_dir) / ("d_" + fmt_double(d) + "mm")).string();
      say(opt.log, "sweep: separation " + fmt_double(d) + " mm");
      auto art = run_scenario(sc, opt);
      if (!art.result)
      {
        // dry run: mesh report only
        row.ok = true;
        rows.push_back(row);
        continue;
      }
      const auto &r = *art.result;
      row.resonance_hz = r.resonance.empty() ? 0.0 : r.resonance.front().frequency;
      for (int a : r.active)
        for (int p : r.passive)
        {
          const auto c = find_max_coupling(r.s, a, p);
          if (c.magnitude > row.max_coupling)
          {
            row.max_coupling = c.magnitude;
            row.max_coupling_hz = c.frequency;
          }
        }
      row.transferred_power = r.fitness;
      row.ok = !r.diverged;
      if (r.diverged)
        row.error = "diverged";
    }
    catch (const std::exception &e)
    {
      row.ok = false;
      row.error = e.what();
    }
    rows.push_back(row);
  }
  return rows;
}

void write_sweep_csv(const std::vector<SweepRow> &rows, std::ostream &os)
{
  os << "distance_mm,ok,resonance_hz,max_coupling_db,max_coupling_hz,transferred_power,error\n";
  os.precision(12);
  for (const auto &r : rows)
  {
    std::string err = r.error;
    std::replace(err.begin(), err.end(), '"', '\'');
    std::replace(err.begin(), err.end(), '\n', ' ');
    os << r.distance << ',' << (r.ok ? 1 : 0) << ',';
    if (r.ok)
      os << r.resonance_hz << ',' << (r.max_coupling > 0.0 ? 20.0 * std::log10(r.max_coupling) : -300.0) << ','
         << r.max_coupling_hz << ',' << r.transferred_power;
    else
      os << ",,,";
    os << ",\"" << err << "\"\n";
  }
}

}  // namespace ris

// Copyright 2026 The rissim Authors
// SPDX-License-Identifier: Apache-2.0

#include "ris/validation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>

#include "ris/constants.hpp"
#include "ris/material_grid.hpp"
#include "ris/mesh.hpp"
#include "ris/optim.hpp"

namespace ris
{

namespace
{

constexpr double kSandboxCell = 0.005;  // mm

LumpedItem port_item(const Vec3 &start, Axis axis, double length, int index)
{
  LumpedItem p;
  p.label = "port" + std::to_string(index);
  p.kind = LumpedKind::Port;
  p.start = start;
  p.axis = axis;
  p.length = length;
  p.port_index = index;
  p.role = index == 0 ? PortRole::Active : PortRole::Passive;
  return p;
}

double seconds_since(std::chrono::steady_clock::time_point t0)
{
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Every smoothing property on one random line set; returns an empty string when all hold.
std::string smoothing_violation(std::mt19937_64 &rng)
{
  std::uniform_int_distribution<int> count(2, 40);
  std::uniform_real_distribution<double> pos(0.0, 20.0);
  std::uniform_real_distribution<double> thr(0.05, 1.0);
  std::bernoulli_distribution is_fixed(0.3);
  const int n = count(rng);
  std::vector<std::pair<double, std::uint8_t>> raw;
  for (int i = 0; i < n; ++i)
    raw.emplace_back(pos(rng), is_fixed(rng) ? 1 : 0);
  std::sort(raw.begin(), raw.end());
  std::vector<double> lines;
  std::vector<std::uint8_t> fixed;
  for (const auto &[x, f] : raw)
  {
    if (!lines.empty() && x == lines.back())
      continue;
    lines.push_back(x);
    fixed.push_back(f);
  }
  const double t = thr(rng);
  const auto out = smooth_lines(lines, fixed, t);
  for (std::size_t i = 0; i < lines.size(); ++i)
    if (fixed[i] && std::find(out.begin(), out.end(), lines[i]) == out.end())
      return "fixed line removed";
  for (std::size_t i = 0; i + 1 < out.size(); ++i)
  {
    if (out[i + 1] - out[i] >= t)
      continue;
    auto fixed_at = [&](double v)
    {
      const auto it = std::find(lines.begin(), lines.end(), v);
      return fixed[static_cast<std::size_t>(it - lines.begin())] != 0;
    };
    if (!(fixed_at(out[i]) && fixed_at(out[i + 1])))
      return "removable sub-threshold pair left";
  }
  std::vector<std::uint8_t> fixed_out;
  for (double v : out)
  {
    const auto it = std::find(lines.begin(), lines.end(), v);
    fixed_out.push_back(fixed[static_cast<std::size_t>(it - lines.begin())]);
  }
  if (smooth_lines(out, fixed_out, t) != out)
    return "not idempotent";
  if (smooth_lines(lines, fixed, t) != out)
    return "not deterministic";
  return {};
}

}  // namespace

LumpedSandbox run_lumped_sandbox(const SeriesRlc &load, const FrequencyGrid &grid, int workers)
{
  const double h = kSandboxCell;
  Scene scene;
  scene.lumped_items.push_back(port_item({h, h, 0.0}, Axis::Z, h, 0));
  LumpedItem l;
  l.label = "load";
  l.kind = LumpedKind::Load;
  l.start = {h, h, h};
  l.axis = Axis::Z;
  l.length = h;
  l.series = load;
  scene.lumped_items.push_back(l);
  scene.finalize();
  const Mesh mesh = Mesh::uniform({{0.0, 0.0, 0.0}, {2 * h, 2 * h, 2 * h}}, h, 0);
  const MaterialGrid g = rasterize(scene, mesh, 8e9);
  RunConfig cfg;
  cfg.max_timesteps = 2000000;
  cfg.workers = workers;
  SourceSpec src;
  LumpedSandbox out;
  out.grid = grid;
  out.record = run_simulation(g, mesh, 0, src, cfg);
  const auto spectra = port_spectra(out.record, grid);
  out.impedance = feed_impedance(spectra, 0);
  const auto s = scattering_matrix({spectra}, 1);
  for (std::size_t f = 0; f < static_cast<std::size_t>(grid.n_points); ++f)
    out.s11.push_back(s.at(0, 0, f));
  out.powers = port_powers(spectra);
  return out;
}

PropagationResult run_free_space(bool absorber)
{
  const auto t0 = std::chrono::steady_clock::now();
  Scene scene;
  scene.lumped_items.push_back(port_item({0.0, 0.0, 0.0}, Axis::Z, 1.0, 0));
  for (double x : {60.0, 90.0})
  {
    LumpedItem p;
    p.label = "probe_" + std::to_string(static_cast<int>(x));
    p.kind = LumpedKind::Probe;
    p.start = {x, 0.0, 0.0};
    p.axis = Axis::Z;
    p.length = 1.0;
    scene.lumped_items.push_back(p);
  }
  scene.finalize();
  const Mesh mesh = Mesh::uniform({{-20.0, -20.0, -20.0}, {110.0, 20.0, 21.0}}, 1.0, 8);
  const MaterialGrid g = rasterize(scene, mesh, 8e9);
  RunConfig cfg;
  cfg.disable_pml = !absorber;
  SourceSpec src;
  // The far probe sees the pulse peak at t0 + 0.3 ns; stop well after that.
  cfg.max_timesteps = static_cast<long>(std::ceil((src.delay() + 2.0 * src.tau() + 0.5e-9) /
                                                  stable_timestep(mesh, g, cfg.cfl_factor)));
  cfg.energy_stop_db = -300.0;
  const SimRecord rec = run_simulation(g, mesh, 0, src, cfg);
  const auto near = envelope(rec.probe_voltage[0]);
  const auto far = envelope(rec.probe_voltage[1]);
  PropagationResult r;
  r.dt = rec.dt;
  r.delay = (peak_position(far) - peak_position(near)) * rec.dt;
  r.wall_seconds = seconds_since(t0);
  return r;
}

EnergyResult run_closed_box(double tan_delta, long steps_after_extinction)
{
  const auto t0 = std::chrono::steady_clock::now();
  Scene scene;
  // A huge internal resistance turns the port into a weak current source that barely loads
  // the cavity once the source is off.
  auto port = port_item({7.0, 8.0, 9.0}, Axis::Z, 1.0, 0);
  port.port_resistance = 1e9;
  scene.lumped_items.push_back(port);
  if (tan_delta > 0.0)
  {
    scene.primitives.push_back({{{0.0, 0.0, 0.0}, {20.0, 20.0, 20.0}},
                                Material::dielectric(2.2, tan_delta), Part::Substrate, "fill"});
  }
  scene.finalize();
  const Mesh mesh = Mesh::uniform({{0.0, 0.0, 0.0}, {20.0, 20.0, 20.0}}, 1.0, 0);
  const MaterialGrid g = rasterize(scene, mesh, 8e9);
  SourceSpec src;
  src.amplitude = 1e9;
  RunConfig cfg;
  cfg.energy_stop_db = -300.0;
  const double dt = stable_timestep(mesh, g, cfg.cfl_factor);
  const long off = static_cast<long>(std::ceil(src.end_time() / dt)) + 1;
  cfg.max_timesteps = off + steps_after_extinction;
  const SimRecord rec = run_simulation(g, mesh, 0, src, cfg);
  EnergyResult r;
  r.dt = rec.dt;
  r.energy.assign(rec.energy.begin() + std::min<long>(off, rec.steps), rec.energy.end());
  r.wall_seconds = seconds_since(t0);
  return r;
}

SParamMatrix run_two_dipoles(const FrequencyGrid &grid)
{
  Scene scene;
  scene.lumped_items.push_back(port_item({0.0, 0.0, 0.0}, Axis::Z, 1.0, 0));
  scene.lumped_items.push_back(port_item({10.0, 0.0, 0.0}, Axis::Z, 1.0, 1));
  // A lossy block between the dipoles makes the structure non-trivial.
  scene.primitives.push_back({{{3.0, -4.0, -3.0}, {7.0, 4.0, 4.0}},
                              Material::dielectric(3.0, 0.05), Part::Other, "block"});
  scene.finalize();
  const Mesh mesh = Mesh::uniform({{-14.0, -14.0, -14.0}, {24.0, 14.0, 15.0}}, 1.0, 8);
  const MaterialGrid g = rasterize(scene, mesh, 8e9);
  RunConfig cfg;
  SourceSpec src;
  std::vector<PortSpectra> runs;
  for (int p : {0, 1})
    runs.push_back(port_spectra(run_simulation(g, mesh, p, src, cfg), grid));
  return scattering_matrix(runs, 2);
}

nlohmann::json to_json(const CheckResult &c)
{
  return {{"name", c.name},
          {"passed", c.passed},
          {"measured", c.measured},
          {"expected", c.expected},
          {"tolerance", c.tolerance},
          {"detail", c.detail}};
}

nlohmann::json validate_platform(const PlatformOptions &opt)
{
  std::vector<CheckResult> checks;
  const FrequencyGrid band{6e9, 10e9, 41};

  {
    const auto sb = run_lumped_sandbox({50.0, 0.0, std::nullopt}, band);
    double worst = 0.0;
    for (const auto &z : sb.impedance.z)
      worst = std::max({worst, std::abs(z.real() - 50.0), std::abs(z.imag())});
    checks.push_back({"lumped_resistor_impedance", worst <= 1.0, worst, 0.0, 1.0,
                      "max deviation of Z from 50+0j ohm over 6-10 GHz"});
  }
  {
    const auto sb = run_lumped_sandbox({100.0, 0.0, std::nullopt}, band);
    double worst = 0.0;
    for (const auto &s : sb.s11)
      worst = std::max(worst, std::abs(std::abs(s) - 1.0 / 3.0));
    checks.push_back({"lumped_100ohm_reflection", worst <= 0.02, worst, 0.0, 0.02,
                      "max deviation of |S11| from 1/3"});
  }
  {
    // Canonical reflections from synthetic port spectra: open, short, matched.
    PortSpectra sp;
    sp.grid = {6e9, 10e9, 3};
    sp.active_port = 0;
    sp.port_indices = {0};
    double worst = 0.0;
    for (const auto &[v, i, expect] : {std::tuple{complex(1.0), complex(0.0), 1.0},
                                       std::tuple{complex(0.0), complex(0.02), -1.0},
                                       std::tuple{complex(50.0), complex(1.0), 0.0}})
    {
      sp.voltage = {std::vector<complex>(3, v)};
      sp.current = {std::vector<complex>(3, i)};
      const auto s = scattering_matrix({sp}, 1);
      worst = std::max(worst, std::abs(s.at(0, 0, 1) - expect));
    }
    checks.push_back({"canonical_reflections", worst <= 1e-12, worst, 0.0, 1e-12,
                      "open +1, short -1, matched 0"});
  }
  {
    const auto r = run_free_space(!opt.disable_pml);
    const double expect = 0.030 / constants::c0;
    checks.push_back({"free_space_propagation", std::abs(r.delay - expect) <= 2.0 * r.dt, r.delay, expect,
                      2.0 * r.dt, "pulse transit over 30 mm of vacuum, s"});
  }
  {
    const auto e = run_closed_box(0.0);
    const auto [mn, mx] = std::minmax_element(e.energy.begin(), e.energy.end());
    const double drift = e.energy.empty() || e.energy.front() <= 0.0 ? 1.0 : (*mx - *mn) / e.energy.front();
    checks.push_back({"closed_box_energy", drift < 0.01, drift, 0.0, 0.01,
                      "relative energy drift over 1000 steps after extinction"});
  }
  {
    const auto s = run_two_dipoles({6e9, 10e9, 41});
    double recip = 0.0, column = 0.0;
    for (std::size_t f = 0; f < 41; ++f)
    {
      recip = std::max(recip, std::abs(s.at(0, 1, f) - s.at(1, 0, f)));
      for (int j = 0; j < 2; ++j)
        column = std::max(column, std::norm(s.at(0, j, f)) + std::norm(s.at(1, j, f)));
    }
    checks.push_back({"reciprocity", recip <= 0.05, recip, 0.0, 0.05, "max |S12 - S21|, two dipoles"});
    checks.push_back({"passivity", column <= 1.01, column, 1.0, 0.01, "max column power sum"});
  }
  {
    std::mt19937_64 rng(2026);
    int bad = 0;
    std::string first;
    for (int k = 0; k < 1000; ++k)
    {
      const auto why = smoothing_violation(rng);
      if (!why.empty() && bad++ == 0)
        first = why;
    }
    checks.push_back({"mesh_properties", bad == 0, static_cast<double>(bad), 0.0, 0.0,
                      bad == 0 ? "1000 random line sets" : first});
  }
  {
    Parameterization p;
    for (int d = 0; d < 4; ++d)
      p.entries.push_back({"x" + std::to_string(d), ParamKind::Geometry, -1, "x", -5.0, 5.0, ""});
    OptimizerConfig cfg;
    cfg.population = 20;
    cfg.max_evaluations = 2000;
    cfg.seed = 7;
    const auto r = optimize([](const std::vector<double> &x)
                            {
                              double s = 0.0;
                              for (double v : x)
                                s += v * v;
                              return -s;
                            },
                            p, cfg);
    checks.push_back({"de_sphere", r.best.fitness > -1e-6, r.best.fitness, 0.0, 1e-6,
                      "best of 2000 evaluations on the 4-D sphere"});
  }

  nlohmann::json list = nlohmann::json::array();
  bool all = true;
  for (const auto &c : checks)
  {
    list.push_back(to_json(c));
    all = all && c.passed;
  }
  return {{"schema", "ris.validation"}, {"version", 1}, {"passed", all}, {"checks", list}};
}

}  // namespace ris

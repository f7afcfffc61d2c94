// Copyright 2026 The rissim Authors
// SPDX-License-Identifier: Apache-2.0

// Acceptance harness: one line per criterion. Slow criteria run only with
// RIS_ACCEPTANCE_SLOW=1. Exit status is 0 when the harness completes; pass --strict to make
// any FAIL line turn into a non-zero exit.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ris/error.hpp"
#include "ris/mesh.hpp"
#include "ris/optim.hpp"
#include "ris/pipeline.hpp"
#include "ris/rf.hpp"
#include "ris/scenario.hpp"
#include "ris/simulation.hpp"
#include "ris/validation.hpp"

using namespace ris;
namespace fs = std::filesystem;

namespace
{

constexpr double kC0 = 299792458.0;

enum class Verdict
{
  Pass,
  Fail,
  Skip
};

struct Line
{
  int id;
  std::string title;
  Verdict verdict;
  std::string detail;
  double seconds;
};

std::vector<Line> g_lines;

bool slow_enabled()
{
  const char *v = std::getenv("RIS_ACCEPTANCE_SLOW");
  return v != nullptr && std::string(v) != "0" && std::string(v) != "";
}

std::string fmt(double v, int prec = 4)
{
  std::ostringstream os;
  os.precision(prec);
  os << v;
  return os.str();
}

void report(int id, const std::string &title, Verdict v, const std::string &detail, double seconds)
{
  const char *tag = v == Verdict::Pass ? "PASS" : (v == Verdict::Fail ? "FAIL" : "SKIP");
  std::cout << "[" << tag << "] " << id << ". " << title << ": " << detail;
  if (v != Verdict::Skip)
    std::cout << " (" << fmt(seconds, 3) << " s)";
  std::cout << std::endl;
  g_lines.push_back({id, title, v, detail, seconds});
}

template <class F>
double timed(F &&f)
{
  const auto t0 = std::chrono::steady_clock::now();
  f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Scenario shipped_scenario(const std::string &file)
{
  return load_scenario(fs::path(RIS_SOURCE_DIR) / "scenarios" / file);
}

// S-matrix of a model with every listed port excited in turn.
SParamMatrix excite(const Scenario &s, const PreparedModel &m, const std::vector<int> &ports)
{
  std::vector<PortSpectra> runs;
  for (int p : ports)
  {
    const auto rec = run_simulation(m.grid, m.mesh, p, s.source, s.run);
    if (rec.stop_reason == StopReason::Diverged)
      throw Error("run for port " + std::to_string(p) + " diverged");
    runs.push_back(port_spectra(rec, s.analysis.grid));
  }
  return scattering_matrix(runs, static_cast<int>(m.scene.port_count()), s.analysis.z0);
}

double db(complex z) { return 20.0 * std::log10(std::max(std::abs(z), 1e-300)); }

// 1. feed impedance of an ideal resistor and the reflection of a 100 ohm load
void criterion_lumped()
{
  const FrequencyGrid grid;
  double worst_re = 0.0, worst_im = 0.0, s11 = 0.0;
  int undefined = 0;
  const double secs = timed([&] {
    SeriesRlc r50;
    r50.resistance = 50.0;
    const auto a = run_lumped_sandbox(r50, grid);
    for (std::size_t f = 0; f < a.impedance.z.size(); ++f)
    {
      if (!a.impedance.defined[f])
      {
        ++undefined;
        continue;
      }
      worst_re = std::max(worst_re, std::abs(a.impedance.z[f].real() - 50.0));
      worst_im = std::max(worst_im, std::abs(a.impedance.z[f].imag()));
    }
    SeriesRlc r100;
    r100.resistance = 100.0;
    const auto b = run_lumped_sandbox(r100, grid);
    for (const auto &g : b.s11)
      s11 = std::max(s11, std::abs(std::abs(g) - 1.0 / 3.0));
  });
  const bool ok = worst_re <= 1.0 && worst_im <= 1.0 && s11 <= 0.02 && undefined == 0 && secs < 10.0;
  report(1, "lumped-circuit oracle", ok ? Verdict::Pass : Verdict::Fail,
         "max |Re Z - 50| = " + fmt(worst_re) + " ohm, max |Im Z| = " + fmt(worst_im) +
             " ohm, max ||S11| - 1/3| = " + fmt(s11) + ", runtime limit 10 s",
         secs);
}

// 2. pulse transit between two probes 30 mm apart
void criterion_free_space()
{
  PropagationResult r;
  const double secs = timed([&] { r = run_free_space(true); });
  const double expected = 0.030 / kC0;
  const double err = std::abs(r.delay - expected);
  const bool ok = err <= 2.0 * r.dt && secs < 60.0;
  report(2, "free-space propagation", ok ? Verdict::Pass : Verdict::Fail,
         "delay " + fmt(r.delay * 1e12, 6) + " ps vs " + fmt(expected * 1e12, 6) + " ps, |error| " +
             fmt(err * 1e12, 3) + " ps, tolerance 2 dt = " + fmt(2.0 * r.dt * 1e12, 3) + " ps",
         secs);
}

// 3. closed box: lossless drift and lossy decay after the source is off
void criterion_energy()
{
  double drift = 0.0;
  std::size_t rises = 0, steps = 0;
  const double secs = timed([&] {
    const auto lossless = run_closed_box(0.0, 1000);
    const double w0 = lossless.energy.front();
    for (double w : lossless.energy)
      drift = std::max(drift, std::abs(w - w0) / w0);
    const auto lossy = run_closed_box(0.024, 1000);
    steps = lossy.energy.size();
    for (std::size_t n = 1; n < lossy.energy.size(); ++n)
      rises += lossy.energy[n] < lossy.energy[n - 1] ? 0 : 1;
  });
  const bool ok = drift < 0.01 && rises == 0 && steps >= 1000 && secs < 60.0;
  report(3, "energy conservation", ok ? Verdict::Pass : Verdict::Fail,
         "lossless drift " + fmt(drift, 3) + " over 1000 steps, lossy non-decreasing steps " +
             std::to_string(rises) + " of " + std::to_string(steps),
         secs);
}

// 4 and 5 share the step-one unit-cell pair
void criteria_unit_cell()
{
  const auto s = shipped_scenario("step1_unit_cell.json");
  SParamMatrix sm;
  double secs = 0.0;
  std::string error;
  try
  {
    secs = timed([&] {
      const auto m = prepare_model(s);
      sm = excite(s, m, {0, 1});
    });
  }
  catch (const std::exception &e)
  {
    error = e.what();
  }
  if (!error.empty())
  {
    report(4, "reciprocity and passivity (1x1 pair)", Verdict::Fail, error, secs);
    report(5, "unit-cell resonance", Verdict::Fail, error, secs);
    return;
  }
  double recip = 0.0, passive = 0.0;
  for (std::size_t f = 0; f < static_cast<std::size_t>(sm.grid.n_points); ++f)
  {
    recip = std::max(recip, std::abs(db(sm.at(0, 1, f)) - db(sm.at(1, 0, f))));
    for (int j = 0; j < 2; ++j)
      passive = std::max(passive, std::norm(sm.at(0, j, f)) + std::norm(sm.at(1, j, f)));
  }
  const bool ok4 = recip <= 0.5 && passive <= 1.01 && secs < 1800.0;
  report(4, "reciprocity and passivity (1x1 pair)", ok4 ? Verdict::Pass : Verdict::Fail,
         "max ||S12| - |S21|| = " + fmt(recip, 3) + " dB, max column power sum " + fmt(passive, 5), secs);

  const auto r = find_resonance(sm, 0, s.analysis.threshold_db);
  const bool ok5 = r.frequency >= 7.2e9 && r.frequency <= 8.8e9 && secs < 1800.0;
  report(5, "unit-cell resonance", ok5 ? Verdict::Pass : Verdict::Fail,
         "min |S11| " + fmt(r.min_db, 4) + " dB at " + fmt(r.frequency / 1e9, 4) +
             " GHz, required [7.2, 8.8] GHz, -10 dB bandwidth " + fmt(r.bandwidth / 1e6, 4) +
             " MHz (runtime shared with 4)",
         secs);

  if (slow_enabled())
  {
    // sensitivity to the unstated groundplane
    auto open = s;
    open.pair.ris1.cell.substrate.has_groundplane = false;
    open.pair.ris2.cell.substrate.has_groundplane = false;
    SParamMatrix so;
    const double t = timed([&] { so = excite(open, prepare_model(open), {0}); });
    const auto ro = find_resonance(so, 0, s.analysis.threshold_db);
    std::cout << "[INFO] 5. without groundplane: min |S11| " << fmt(ro.min_db, 4) << " dB at "
              << fmt(ro.frequency / 1e9, 4) << " GHz (" << fmt(t, 3) << " s)" << std::endl;
  }
}

// 6. 3x3: mirrored corner ports respond alike, and some active-passive pair couples
void criterion_three_by_three()
{
  const std::string title = "3x3 symmetric ports and coupling";
  if (!slow_enabled())
  {
    report(6, title, Verdict::Skip, "slow suite, set RIS_ACCEPTANCE_SLOW=1 (about an hour)", 0.0);
    return;
  }
  const auto s = shipped_scenario("step2_3x3.json");
  SParamMatrix sm;
  const double secs = timed([&] { sm = excite(s, prepare_model(s), {0, 2}); });
  // ports 0 and 2 are the two corners of the first row, mirror images about the array's y axis
  double worst = 0.0;
  for (std::size_t f = 0; f < static_cast<std::size_t>(sm.grid.n_points); ++f)
    worst = std::max(worst, std::abs(db(sm.at(0, 0, f)) - db(sm.at(2, 2, f))));
  double best = -1e9;
  for (int j : {0, 2})
    for (int i = 9; i < 18; ++i)
      best = std::max(best, 20.0 * std::log10(std::max(find_max_coupling(sm, j, i).magnitude, 1e-300)));
  const bool ok = worst <= 0.5 && best >= -40.0;
  report(6, title, ok ? Verdict::Pass : Verdict::Fail,
         "max ||S11| - |S33|| = " + fmt(worst, 3) + " dB, strongest active-passive coupling " + fmt(best, 4) +
             " dB",
         secs);
}

// 7. 11x11 is shipped as a scenario only
void criterion_eleven()
{
  report(7, "11x11 two-band response", Verdict::Skip,
         "not desk-scale (121 runs); run 'rissim pair scenarios/step3_11x11.json --large', expected bands "
         "near 8 GHz (about 200 MHz) and 8.9 GHz (about 250 MHz)",
         0.0);
}

// 8. smoothing rules on random line sets, checked here from first principles
void criterion_mesher()
{
  int bad = 0;
  std::string first;
  const double secs = timed([&] {
    std::mt19937_64 rng(8);
    std::uniform_int_distribution<int> count(2, 80);
    std::uniform_real_distribution<double> pos(-50.0, 50.0);
    std::uniform_real_distribution<double> thr(0.01, 3.0);
    std::bernoulli_distribution fix(0.3);
    for (int trial = 0; trial < 1000; ++trial)
    {
      std::set<double> xs;
      const int n = count(rng);
      while (static_cast<int>(xs.size()) < n)
        xs.insert(pos(rng));
      std::vector<double> lines(xs.begin(), xs.end());
      std::vector<std::uint8_t> fixed;
      for (std::size_t i = 0; i < lines.size(); ++i)
        fixed.push_back(fix(rng) ? 1 : 0);
      const double t = thr(rng);
      auto is_fixed = [&](double v) {
        const auto it = std::lower_bound(lines.begin(), lines.end(), v);
        return it != lines.end() && *it == v && fixed[static_cast<std::size_t>(it - lines.begin())];
      };
      const auto out = smooth_lines(lines, fixed, t);
      std::string why;
      for (std::size_t i = 0; i < lines.size() && why.empty(); ++i)
        if (fixed[i] && !std::binary_search(out.begin(), out.end(), lines[i]))
          why = "fixed line lost";
      for (std::size_t i = 0; i + 1 < out.size() && why.empty(); ++i)
        if (out[i + 1] - out[i] < t && !(is_fixed(out[i]) && is_fixed(out[i + 1])))
          why = "removable pair below threshold";
      std::vector<std::uint8_t> f2;
      for (double v : out)
        f2.push_back(is_fixed(v) ? 1 : 0);
      if (why.empty() && smooth_lines(out, f2, t) != out)
        why = "not idempotent";
      if (why.empty() && smooth_lines(lines, fixed, t) != out)
        why = "not deterministic";
      if (!why.empty() && bad++ == 0)
        first = "trial " + std::to_string(trial) + ": " + why;
    }
  });
  const bool ok = bad == 0 && secs < 5.0;
  report(8, "mesher properties", ok ? Verdict::Pass : Verdict::Fail,
         bad == 0 ? "1000 random line sets, all properties hold" : std::to_string(bad) + " failures, " + first,
         secs);
}

// 9. DE on the sphere, and a lumped-C search against a grid sweep
void criterion_optimizer()
{
  Parameterization box;
  for (int d = 0; d < 4; ++d)
    box.entries.push_back({"x" + std::to_string(d), ParamKind::Geometry, -1, "x", -5.0, 5.0, ""});
  int reached = 0;
  std::string misses;
  long max_evals = 0;
  const double secs = timed([&] {
    for (std::uint64_t seed = 1; seed <= 10; ++seed)
    {
      OptimizerConfig cfg;
      cfg.seed = seed;
      cfg.population = 20;
      cfg.max_evaluations = 2000;
      const auto r = optimize(
          [](const std::vector<double> &x) {
            double t = 0.0;
            for (double v : x)
              t += v * v;
            return -t;
          },
          box, cfg);
      max_evals = std::max(max_evals, r.evaluations);
      if (r.best.fitness > -1e-6)
        ++reached;
      else
        misses += " seed " + std::to_string(seed) + ": " + fmt(r.best.fitness, 3);
    }
  });
  const bool sphere_ok = reached == 10 && max_evals <= 2000 && secs < 1.0;

  if (!slow_enabled())
  {
    report(9, "optimizer (sphere part; pair part is slow suite)", sphere_ok ? Verdict::Pass : Verdict::Fail,
           std::to_string(reached) + "/10 seeds above -1e-6 within " + std::to_string(max_evals) +
               " evaluations" + (misses.empty() ? "" : ";" + misses),
           secs);
    return;
  }

  auto s = shipped_scenario("optimize_lumped_c.json");
  const auto &entry = s.parameters->entries.front();
  double grid_best = -INFINITY, de_best = -INFINITY;
  long de_evals = 0;
  const double pair_secs = timed([&] {
    const auto model = prepare_model(s);
    for (int k = 0; k < 12; ++k)
    {
      const double c = entry.lower + (entry.upper - entry.lower) * k / 11.0;
      grid_best = std::max(grid_best, evaluate_candidate({c}, s, *s.parameters, &model));
    }
    const auto r = run_optimization(s);
    de_best = r.best.fitness;
    de_evals = r.evaluations;
  });
  const bool pair_ok = de_best >= grid_best - 1e-6;
  report(9, "optimizer", sphere_ok && pair_ok ? Verdict::Pass : Verdict::Fail,
         "sphere " + std::to_string(reached) + "/10 seeds" + (misses.empty() ? "" : " (" + misses + " )") +
             "; lumped-C DE best " + fmt(de_best, 6) + " after " + std::to_string(de_evals) +
             " evaluations vs 12-point grid best " + fmt(grid_best, 6),
         secs + pair_secs);
}

// 10. identical scenario, different worker counts, byte-identical data files
void criterion_determinism()
{
  auto base = parse_scenario(R"({
    "mesh": {"fine_resolution_mm": 1.05, "coarse_resolution_mm": 2.5, "pml_cells": 6, "air_padding_mm": 5},
    "analysis": {"n_points": 81},
    "run": {"energy_stop_db": -30}
  })");
  const fs::path root = fs::temp_directory_path() / "ris_acceptance_determinism";
  fs::remove_all(root);
  std::vector<std::string> differ;
  bool sandbox_same = false;
  const double secs = timed([&] {
    std::vector<fs::path> dirs;
    for (int workers : {1, 1, 2})
    {
      auto s = base;
      s.run.workers = workers;
      s.output_dir = (root / ("run" + std::to_string(dirs.size()))).string();
      run_scenario(s);
      dirs.push_back(s.output_dir);
    }
    for (const auto &entry : fs::directory_iterator(dirs[0]))
    {
      const auto name = entry.path().filename().string();
      if (name == "manifest.json")
        continue;  // wall-clock timings
      auto slurp = [](const fs::path &p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream os;
        os << in.rdbuf();
        return os.str();
      };
      // the scenario echo legitimately differs in the two inputs that were varied
      auto content = [&](const fs::path &p) {
        if (name != "scenario.json")
          return slurp(p);
        auto j = nlohmann::json::parse(slurp(p));
        j.erase("output_dir");
        j["run"].erase("workers");
        return j.dump();
      };
      const auto ref = content(entry.path());
      for (std::size_t k = 1; k < dirs.size(); ++k)
        if (content(dirs[k] / name) != ref)
          differ.push_back(name);
    }
    SeriesRlc r50;
    r50.resistance = 50.0;
    const auto a = run_lumped_sandbox(r50, FrequencyGrid{}, 1);
    const auto b = run_lumped_sandbox(r50, FrequencyGrid{}, 2);
    sandbox_same = a.record.voltage == b.record.voltage && a.record.current == b.record.current;
  });
  fs::remove_all(root);
  const bool ok = differ.empty() && sandbox_same;
  std::string detail = differ.empty() ? "data artifacts byte-identical over 3 runs (workers 1, 1, 2); scenario echo equal up to output_dir and workers"
                                      : "differing files:";
  for (const auto &d : differ)
    detail += " " + d;
  detail += sandbox_same ? "; sandbox records identical" : "; sandbox records differ";
  report(10, "determinism", ok ? Verdict::Pass : Verdict::Fail, detail, secs);
}

}  // namespace

int main(int argc, char **argv)
{
  bool strict = false;
  std::string report_path;
  for (int i = 1; i < argc; ++i)
  {
    const std::string a = argv[i];
    if (a == "--strict")
      strict = true;
    else if (a == "--report" && i + 1 < argc)
      report_path = argv[++i];
    else
    {
      std::cerr << "usage: ris_acceptance [--strict] [--report file.json]\n";
      return 2;
    }
  }

  const std::vector<std::function<void()>> criteria{criterion_lumped,         criterion_free_space, criterion_energy,
                                                    criteria_unit_cell,       criterion_three_by_three,
                                                    criterion_eleven,         criterion_mesher,     criterion_optimizer,
                                                    criterion_determinism};
  for (const auto &c : criteria)
  {
    try
    {
      c();
    }
    catch (const std::exception &e)
    {
      std::cout << "[FAIL] harness error: " << e.what() << std::endl;
      g_lines.push_back({0, "harness", Verdict::Fail, e.what(), 0.0});
    }
  }

  int pass = 0, fail = 0, skip = 0;
  nlohmann::json list = nlohmann::json::array();
  for (const auto &l : g_lines)
  {
    pass += l.verdict == Verdict::Pass;
    fail += l.verdict == Verdict::Fail;
    skip += l.verdict == Verdict::Skip;
    list.push_back({{"criterion", l.id},
                    {"title", l.title},
                    {"verdict", l.verdict == Verdict::Pass ? "pass" : (l.verdict == Verdict::Fail ? "fail" : "skip")},
                    {"detail", l.detail},
                    {"seconds", l.seconds}});
  }
  std::cout << "summary: " << pass << " pass, " << fail << " fail, " << skip << " skip" << std::endl;
  if (!report_path.empty())
  {
    std::ofstream(report_path) << nlohmann::json{{"schema", "ris.acceptance"}, {"criteria", list}}.dump(2) << '\n';
  }
  return strict && fail > 0 ? 1 : 0;
}

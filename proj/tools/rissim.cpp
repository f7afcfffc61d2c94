// Copyright 2026 The rissim Authors
// SPDX-License-Identifier: Apache-2.0

// rissim: command-line front end for unit-cell design, RIS pair runs, distance sweeps,
// optimization, mesh previews and the built-in validation suite.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ris/error.hpp"
#include "ris/io_util.hpp"
#include "ris/pipeline.hpp"
#include "ris/scenario.hpp"
#include "ris/validation.hpp"
#include "ris/version.hpp"

namespace
{

enum Exit
{
  kOk = 0,
  kValidation = 1,
  kRuntime = 2
};

struct Overrides
{
  std::string scenario;
  std::string output;
  std::optional<double> fine, coarse, separation;
  std::optional<int> rows, cols, workers;
  std::optional<long> max_steps;
  bool dry_run = false;
  bool large = false;
  bool quiet = false;
};

void add_common(CLI::App *cmd, Overrides &o, bool scenario_required)
{
  auto *opt = cmd->add_option("scenario", o.scenario, "scenario JSON file");
  if (scenario_required)
    opt->required();
  opt->check(CLI::ExistingFile);
  cmd->add_option("-o,--output", o.output, "output directory (overrides output_dir)");
  cmd->add_option("--fine-mm", o.fine, "fine mesh resolution");
  cmd->add_option("--coarse-mm", o.coarse, "coarse mesh resolution");
  cmd->add_option("--separation-mm", o.separation, "centre-to-centre RIS separation");
  cmd->add_option("--rows", o.rows, "array rows");
  cmd->add_option("--cols", o.cols, "array columns");
  cmd->add_option("--workers", o.workers, "solver threads (0 = all)");
  cmd->add_option("--max-steps", o.max_steps, "time-step limit per run");
  cmd->add_flag("--dry-run", o.dry_run, "print the mesh report and cost estimate only");
  cmd->add_flag("--large", o.large, "allow arrays above 5x5");
  cmd->add_flag("-q,--quiet", o.quiet, "no progress log");
}

ris::Scenario load(const Overrides &o)
{
  ris::Scenario s = o.scenario.empty() ? ris::scenario_from_json(nlohmann::json::object())
                                       : ris::load_scenario(o.scenario);
  nlohmann::json j = ris::to_json(s);
  if (!o.output.empty())
    j["output_dir"] = o.output;
  if (o.fine)
    j["mesh"]["fine_resolution_mm"] = *o.fine;
  if (o.coarse)
    j["mesh"]["coarse_resolution_mm"] = *o.coarse;
  if (o.separation)
    j["pair"]["separation_mm"] = *o.separation;
  if (o.rows)
    j["pair"]["rows"] = *o.rows;
  if (o.cols)
    j["pair"]["cols"] = *o.cols;
  if (o.workers)
    j["run"]["workers"] = *o.workers;
  if (o.max_steps)
    j["run"]["max_timesteps"] = *o.max_steps;
  return ris::scenario_from_json(j);
}

ris::RunOptions run_options(const Overrides &o)
{
  ris::RunOptions r;
  r.dry_run = o.dry_run;
  r.large = o.large;
  if (!o.quiet)
    r.log = [](const std::string &m) { std::cerr << m << '\n'; };
  return r;
}

void summarize(const ris::ArtifactSet &a)
{
  std::cout << "artifacts in " << a.dir.string() << '\n';
  if (!a.result)
    return;
  for (const auto &r : a.result->resonance)
  {
    std::cout << "port " << r.port << ": resonance " << r.frequency / 1e9 << " GHz, min |S" << r.port + 1
              << r.port + 1 << "| " << r.min_db << " dB, bandwidth " << r.bandwidth / 1e6 << " MHz"
              << (r.weak ? " (weak resonance)" : "") << '\n';
  }
  std::cout << "power transfer fitness " << a.result->fitness << '\n';
}

std::vector<double> parse_list(const std::string &text)
{
  std::vector<double> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty())
      v.push_back(std::stod(item));
  return v;
}

}  // namespace

int main(int argc, char **argv)
{
  CLI::App app{"rissim: RIS pair simulation platform"};
  app.set_version_flag("--version", ris::kVersion);
  app.require_subcommand(1);

  Overrides unit, pair, sweep, optim, preview;
  auto *c_unit = app.add_subcommand("unit-cell", "single S-SRR pair (1x1), step one of the design flow");
  add_common(c_unit, unit, false);
  auto *c_pair = app.add_subcommand("pair", "RIS pair simulation");
  add_common(c_pair, pair, false);
  auto *c_sweep = app.add_subcommand("sweep", "repeat a pair run over RIS separations");
  add_common(c_sweep, sweep, true);
  std::string distances;
  c_sweep->add_option("--distances-mm", distances, "comma separated, ascending")->required();
  auto *c_opt = app.add_subcommand("optimize", "differential evolution over the scenario parameters");
  add_common(c_opt, optim, true);
  std::optional<long> max_evals;
  std::optional<std::uint64_t> seed;
  c_opt->add_option("--max-evals", max_evals, "evaluation budget");
  c_opt->add_option("--seed", seed, "random seed");
  auto *c_preview = app.add_subcommand("mesh-preview", "mesh report and cost estimate");
  add_common(c_preview, preview, false);
  bool preview_json = false;
  c_preview->add_flag("--json", preview_json, "print the report as JSON");
  auto *c_validate = app.add_subcommand("validate", "built-in oracle suite");
  bool disable_pml = false;
  std::string report_path;
  c_validate->add_flag("--debug-disable-pml", disable_pml, "fault injection: replace the absorber by a wall");
  c_validate->add_option("-o,--output", report_path, "write the JSON report here");

  try
  {
    app.parse(argc, argv);
  }
  catch (const CLI::ParseError &e)
  {
    const int code = app.exit(e);
    return code == 0 ? kOk : kValidation;
  }

  try
  {
    if (c_unit->parsed())
    {
      unit.rows = 1;
      unit.cols = 1;
      const auto s = load(unit);
      summarize(ris::run_scenario(s, run_options(unit)));
    }
    else if (c_pair->parsed())
    {
      const auto s = load(pair);
      summarize(ris::run_scenario(s, run_options(pair)));
    }
    else if (c_sweep->parsed())
    {
      const auto s = load(sweep);
      const auto d = parse_list(distances);
      for (double v : d)
        if (!(v > 0.0))
          throw ris::ValidationError({"sweep: distances must be > 0"});
      const auto rows = ris::distance_sweep(s, d, run_options(sweep));
      std::ostringstream os;
      ris::write_sweep_csv(rows, os);
      ris::write_file_atomic(std::filesystem::path(s.output_dir) / "sweep.csv", os.str());
      std::cout << os.str();
    }
    else if (c_opt->parsed())
    {
      auto s = load(optim);
      if (!s.parameters)
        throw ris::ValidationError({"optimize: scenario has no parameters list"});
      if (!s.optimizer)
        s.optimizer = ris::OptimizerConfig{};
      if (max_evals)
        s.optimizer->max_evaluations = *max_evals;
      if (seed)
        s.optimizer->seed = *seed;
      const auto a = ris::run_scenario(s, run_options(optim));
      summarize(a);
      if (a.optimization)
      {
        std::cout << "best fitness " << a.optimization->best.fitness << " after " << a.optimization->evaluations
                  << " evaluations (" << ris::to_string(a.optimization->stop) << ")\n";
      }
    }
    else if (c_preview->parsed())
    {
      const auto s = load(preview);
      const auto m = ris::prepare_model(s);
      const auto report = ris::mesh_report(m.mesh, s.mesh.max_grading);
      const auto cost = ris::estimate_cost(s, m);
      if (preview_json)
      {
        auto j = report.to_json();
        j["cost_estimate"] = cost.to_json();
        std::cout << j.dump(2) << '\n';
      }
      else
      {
        std::cout << report.to_table() << "cost estimate: " << cost.to_json().dump() << '\n';
      }
    }
    else if (c_validate->parsed())
    {
      ris::PlatformOptions po;
      po.disable_pml = disable_pml;
      const auto report = ris::validate_platform(po);
      const std::string text = report.dump(2) + "\n";
      if (!report_path.empty())
        ris::write_file_atomic(report_path, text);
      std::cout << text;
      return report.at("passed").get<bool>() ? kOk : kValidation;
    }
  }
  catch (const ris::ValidationError &e)
  {
    std::cerr << "validation error: " << e.what() << '\n';
    return kValidation;
  }
  catch (const std::exception &e)
  {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntime;
  }
  return kOk;
}

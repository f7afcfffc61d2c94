// Copyright 2026 The rissim Authors
// SPDX-License-Identifier: Apache-2.0

#include "ris/optim.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <future>
#include <limits>
#include <random>

#include "ris/error.hpp"

namespace ris
{

namespace
{

double clamp_to(const ParamEntry &e, double v) { return std::clamp(v, e.lower, e.upper); }

}  // namespace

const char *to_string(ParamKind k) noexcept
{
  switch (k)
  {
    case ParamKind::LumpedR:
      return "lumped-R";
    case ParamKind::LumpedL:
      return "lumped-L";
    case ParamKind::LumpedC:
      return "lumped-C";
    case ParamKind::Geometry:
      return "geometry";
  }
  return "geometry";
}

ParamKind param_kind_from(const std::string &s)
{
  if (s == "lumped-R")
    return ParamKind::LumpedR;
  if (s == "lumped-L")
    return ParamKind::LumpedL;
  if (s == "lumped-C")
    return ParamKind::LumpedC;
  if (s == "geometry")
    return ParamKind::Geometry;
  throw Error("unknown parameter kind '" + s + "'");
}

const char *to_string(OptStop s) noexcept
{
  switch (s)
  {
    case OptStop::TargetReached:
      return "target-reached";
    case OptStop::EvalBudget:
      return "eval-budget";
    case OptStop::TimeBudget:
      return "time-budget";
  }
  return "eval-budget";
}

bool Parameterization::geometry() const noexcept
{
  return std::any_of(entries.begin(), entries.end(),
                     [](const auto &e) { return e.kind == ParamKind::Geometry; });
}

std::vector<std::string> validate(const Parameterization &p)
{
  std::vector<std::string> v;
  if (p.entries.empty())
    v.emplace_back("parameters: at least one entry required");
  for (const auto &e : p.entries)
  {
    const std::string tag = "parameters." + (e.name.empty() ? std::string("?") : e.name);
    if (!(e.lower < e.upper))
      v.push_back(tag + ": lower must be < upper");
    if (e.kind == ParamKind::Geometry && e.field.empty())
      v.push_back(tag + ": geometry entry needs a field path");
    if (e.kind != ParamKind::Geometry && e.lower < 0.0)
      v.push_back(tag + ": lumped values must be >= 0");
    if (e.kind == ParamKind::LumpedC && !(e.lower > 0.0))
      v.push_back(tag + ": capacitance bounds must be > 0");
  }
  return v;
}

int OptimizerConfig::population_for(std::size_t dim) const noexcept
{
  if (population > 0)
    return population;
  return static_cast<int>(std::min<std::size_t>(60, std::max<std::size_t>(4, 15 * dim)));
}

std::vector<std::string> validate(const OptimizerConfig &cfg)
{
  std::vector<std::string> v;
  if (cfg.algorithm != "differential-evolution")
    v.push_back("optimizer.algorithm: only differential-evolution is available");
  if (cfg.population != 0 && cfg.population < 4)
    v.emplace_back("optimizer.population: must be >= 4");
  if (!(cfg.f_weight >= 0.0 && cfg.f_weight <= 2.0))
    v.emplace_back("optimizer.f_weight: must be in [0, 2]");
  if (!(cfg.crossover >= 0.0 && cfg.crossover <= 1.0))
    v.emplace_back("optimizer.crossover: must be in [0, 1]");
  if (cfg.max_evaluations <= 0 && !cfg.target_fitness && !cfg.time_budget_s)
    v.emplace_back("optimizer: at least one stop condition required");
  if (cfg.max_evaluations < 0)
    v.emplace_back("optimizer.max_evaluations: must be >= 0");
  if (cfg.time_budget_s && !(*cfg.time_budget_s > 0.0))
    v.emplace_back("optimizer.time_budget_s: must be > 0");
  if (cfg.workers < 1)
    v.emplace_back("optimizer.workers: must be >= 1");
  return v;
}

OptResult optimize(const FitnessFunction &fitness, const Parameterization &p, const OptimizerConfig &cfg)
{
  {
    auto v = validate(p);
    auto w = validate(cfg);
    v.insert(v.end(), w.begin(), w.end());
    if (!v.empty())
      throw ValidationError(std::move(v));
  }
  const std::size_t dim = p.size();
  const int np = cfg.population_for(dim);
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto start = std::chrono::steady_clock::now();
  const long max_evals = cfg.max_evaluations > 0 ? cfg.max_evaluations : std::numeric_limits<long>::max();

  OptResult res;
  res.best.fitness = -std::numeric_limits<double>::infinity();
  bool stop = false;

  auto elapsed = [&]
  { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(); };

  // Evaluates a batch in candidate order; results are recorded in that order whatever the
  // completion order of the workers.
  auto evaluate = [&](const std::vector<std::vector<double>> &batch)
  {
    std::vector<double> out(batch.size(), -std::numeric_limits<double>::infinity());
    std::vector<double> secs(batch.size(), 0.0);
    const std::size_t workers = static_cast<std::size_t>(std::max(1, cfg.workers));
    for (std::size_t b0 = 0; b0 < batch.size(); b0 += workers)
    {
      const std::size_t b1 = std::min(batch.size(), b0 + workers);
      std::vector<std::future<std::pair<double, double>>> jobs;
      for (std::size_t b = b0; b < b1; ++b)
      {
        auto job = [&, b]
        {
          const auto t0 = std::chrono::steady_clock::now();
          const double f = fitness(batch[b]);
          return std::pair{f, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()};
        };
        jobs.push_back(std::async(workers > 1 ? std::launch::async : std::launch::deferred, job));
      }
      for (std::size_t b = b0; b < b1; ++b)
      {
        auto [f, s] = jobs[b - b0].get();
        out[b] = std::isnan(f) ? -std::numeric_limits<double>::infinity() : f;
        secs[b] = s;
      }
    }
    for (std::size_t b = 0; b < batch.size(); ++b)
    {
      const long id = res.evaluations++;
      res.history.push_back(out[b]);
      res.evaluated.push_back(batch[b]);
      res.eval_seconds.push_back(secs[b]);
      if (res.best.id < 0 || out[b] > res.best.fitness)
        res.best = {batch[b], out[b], id};
    }
    return out;
  };

  auto budget_left = [&]() -> long
  {
    if (cfg.target_fitness && res.best.fitness >= *cfg.target_fitness)
    {
      res.stop = OptStop::TargetReached;
      return 0;
    }
    if (cfg.time_budget_s && elapsed() >= *cfg.time_budget_s)
    {
      res.stop = OptStop::TimeBudget;
      return 0;
    }
    if (res.evaluations >= max_evals)
    {
      res.stop = OptStop::EvalBudget;
      return 0;
    }
    return max_evals - res.evaluations;
  };

  // Initial population.
  std::vector<std::vector<double>> pop;
  for (int k = 0; k < np; ++k)
  {
    std::vector<double> x(dim);
    if (static_cast<std::size_t>(k) < cfg.initial_population.size())
    {
      const auto &seed = cfg.initial_population[static_cast<std::size_t>(k)];
      if (seed.size() != dim)
        throw Error("optimize: initial population entry has wrong dimension");
      for (std::size_t d = 0; d < dim; ++d)
        x[d] = clamp_to(p.entries[d], seed[d]);
    }
    else
    {
      for (std::size_t d = 0; d < dim; ++d)
        x[d] = p.entries[d].lower + unit(rng) * (p.entries[d].upper - p.entries[d].lower);
    }
    pop.push_back(std::move(x));
  }
  const long first = std::min<long>(np, budget_left());
  pop.resize(static_cast<std::size_t>(std::max<long>(first, 0)));
  std::vector<double> fit = evaluate(pop);
  if (!fit.empty() && std::none_of(fit.begin(), fit.end(), [](double f) { return std::isfinite(f); }))
    throw Error("optimize: every initial evaluation failed");
  if (static_cast<int>(pop.size()) < np)
  {
    budget_left();
    return res;
  }

  std::uniform_int_distribution<int> pick(0, np - 1);
  std::uniform_int_distribution<std::size_t> pick_dim(0, dim - 1);
  while (!stop)
  {
    const long left = budget_left();
    if (left <= 0)
      break;
    const std::size_t count = static_cast<std::size_t>(std::min<long>(np, left));
    std::vector<std::vector<double>> trials;
    for (std::size_t t = 0; t < count; ++t)
    {
      const int target = static_cast<int>(t);
      int a, b, c;
      do
        a = pick(rng);
      while (a == target);
      do
        b = pick(rng);
      while (b == target || b == a);
      do
        c = pick(rng);
      while (c == target || c == a || c == b);
      const std::size_t forced = pick_dim(rng);
      std::vector<double> u = pop[t];
      for (std::size_t d = 0; d < dim; ++d)
      {
        if (d == forced || unit(rng) < cfg.crossover)
        {
          const double v = pop[static_cast<std::size_t>(a)][d] +
                           cfg.f_weight * (pop[static_cast<std::size_t>(b)][d] - pop[static_cast<std::size_t>(c)][d]);
          u[d] = clamp_to(p.entries[d], v);
        }
      }
      trials.push_back(std::move(u));
    }
    const auto tf = evaluate(trials);
    for (std::size_t t = 0; t < count; ++t)
    {
      if (tf[t] >= fit[t])
      {
        pop[t] = trials[t];
        fit[t] = tf[t];
      }
    }
    if (count < static_cast<std::size_t>(np))
      stop = true;
  }
  budget_left();
  return res;
}

double default_fitness(const SParamMatrix &s, double f_target, const std::vector<int> &active,
                       const std::vector<int> &passive)
{
  const auto &g = s.grid;
  if (!(f_target >= g.f_start && f_target <= g.f_stop))
    throw Error("default_fitness: target frequency outside the analysis grid");
  const double pos = (f_target - g.f_start) / g.step();
  const std::size_t lo = std::min(static_cast<std::size_t>(std::floor(pos)), static_cast<std::size_t>(g.n_points - 2));
  const double w = pos - static_cast<double>(lo);
  double total = 0.0;
  for (int j : active)
    for (int i : passive)
    {
      const double a = std::norm(s.at(i, j, lo));
      const double b = std::norm(s.at(i, j, lo + 1));
      total += (1.0 - w) * a + w * b;
    }
  return total;
}

nlohmann::json to_json(const Parameterization &p)
{
  nlohmann::json out = nlohmann::json::array();
  for (const auto &e : p.entries)
  {
    nlohmann::json j = {{"name", e.name}, {"kind", to_string(e.kind)}, {"lower", e.lower}, {"upper", e.upper},
                        {"unit", e.unit}};
    if (e.kind == ParamKind::Geometry)
      j["field"] = e.field;
    else
      j["port"] = e.port;
    out.push_back(j);
  }
  return out;
}

Parameterization parameterization_from_json(const nlohmann::json &j)
{
  Parameterization p;
  for (const auto &e : j)
  {
    ParamEntry entry;
    entry.name = e.at("name").get<std::string>();
    entry.kind = param_kind_from(e.at("kind").get<std::string>());
    entry.lower = e.at("lower").get<double>();
    entry.upper = e.at("upper").get<double>();
    entry.unit = e.value("unit", "");
    entry.port = e.value("port", -1);
    entry.field = e.value("field", "");
    p.entries.push_back(entry);
  }
  return p;
}

}  // namespace ris

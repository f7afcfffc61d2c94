// Copyright 2026 The rissim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ris/rf.hpp"

namespace ris
{

enum class ParamKind
{
  LumpedR,
  LumpedL,
  LumpedC,
  Geometry
};

const char *to_string(ParamKind k) noexcept;
ParamKind param_kind_from(const std::string &s);

/// One tunable quantity. Lumped entries target a port index (-1 = every port); geometry
/// entries target a dotted scenario key path, e.g. "pair.cell.srr.ring_separation_mm".
struct ParamEntry
{
  std::string name;
  ParamKind kind = ParamKind::LumpedC;
  int port = -1;
  std::string field;
  double lower = 0.0, upper = 1.0;
  std::string unit;

  friend bool operator==(const ParamEntry &, const ParamEntry &) = default;
};

struct Parameterization
{
  std::vector<ParamEntry> entries;
  std::size_t size() const noexcept { return entries.size(); }
  bool geometry() const noexcept;
  friend bool operator==(const Parameterization &, const Parameterization &) = default;
};

std::vector<std::string> validate(const Parameterization &p);

struct Candidate
{
  std::vector<double> x;
  double fitness = 0.0;
  long id = -1;
};

enum class OptStop
{
  TargetReached,
  EvalBudget,
  TimeBudget
};

const char *to_string(OptStop s) noexcept;

struct OptimizerConfig
{
  std::string algorithm = "differential-evolution";
  int population = 0;  // 0 = 15 * dim capped at 60
  double f_weight = 0.7;
  double crossover = 0.9;
  long max_evaluations = 2000;
  std::optional<double> target_fitness;
  std::optional<double> time_budget_s;
  std::uint64_t seed = 1;
  int workers = 1;  // concurrent evaluations of one generation
  std::vector<std::vector<double>> initial_population;  // optional, clamped to bounds

  int population_for(std::size_t dim) const noexcept;
  friend bool operator==(const OptimizerConfig &, const OptimizerConfig &) = default;
};

std::vector<std::string> validate(const OptimizerConfig &cfg);

struct OptResult
{
  Candidate best;
  std::vector<double> history;                // fitness per evaluation
  std::vector<std::vector<double>> evaluated;  // parameters per evaluation
  std::vector<double> eval_seconds;
  OptStop stop = OptStop::EvalBudget;
  long evaluations = 0;
};

/// Fitness of a parameter vector; higher is better. May return -infinity for failed
/// evaluations. Must be safe to call concurrently when workers > 1.
using FitnessFunction = std::function<double(const std::vector<double> &)>;

/// Differential evolution, rand/1/bin with greedy selection. Throws Error when every initial
/// evaluation fails.
OptResult optimize(const FitnessFunction &fitness, const Parameterization &p, const OptimizerConfig &cfg);

/// Sum over active columns j and passive rows i of |S_ij(f)|^2, interpolated linearly between
/// grid points. Throws Error when f lies outside the grid.
double default_fitness(const SParamMatrix &s, double f_target, const std::vector<int> &active,
                       const std::vector<int> &passive);

nlohmann::json to_json(const Parameterization &p);
Parameterization parameterization_from_json(const nlohmann::json &j);

}  // namespace ris

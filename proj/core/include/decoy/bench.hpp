// Copyright 2026 The Decoy Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "decoy/antireward.hpp"
#include "decoy/environments.hpp"
#include "decoy/observers.hpp"
#include "decoy/planners.hpp"

namespace decoy {

struct PlannerSpec {
  enum class Type { kMeir, kMm, kMmbe, kMmMix };
  Type type = Type::kMeir;
  std::string label;  // column value; defaults to the type name
  std::optional<AntiRewardConfig> antireward;  // required by every type but kMeir
  MeirOptions meir;
  MmOptions mm;
  bool primal_dual = false;  // kMm only
  PrimalDualOptions primal_dual_options;
  double beta = 1.0;  // kMmbe
  MmMixOptions mix;
};

struct ObserverSpec {
  enum class Type { kMceTrue, kMceDemos, kIrlMax, kIrlRandom };
  Type type = Type::kMceTrue;
  IrlConfig irl;
  int n_demos = 10;
  int horizon = 0;  // 0 = discount truncation horizon
  double mass_threshold = 0.05;
};

struct MetricSelection {
  bool pearson = true;
  bool epic = true;
  bool rollout = true;
  bool ordering = true;
};

/// Environment family plus the per-seed size ranges. Only random MDPs draw
/// their sizes per seed; the draw is a pure function of the seed.
struct EnvSweep {
  EnvSpec base;
  std::vector<std::uint64_t> seeds;
  std::optional<std::pair<int, int>> n_states_range;
  std::optional<std::pair<int, int>> n_actions_range;

  EnvSpec spec_for(std::uint64_t seed) const;
};

struct ExperimentConfig {
  EnvSweep env;
  std::vector<PlannerSpec> planners;
  std::vector<RewardConstraint> thresholds;
  std::vector<ObserverSpec> observers;
  MetricSelection metrics;
  int ordering_pairs = 2000;
  std::uint64_t seed = 0;
  // Wall time breaks byte-for-byte reproducibility, so it is opt-in.
  bool record_wall_time = false;
  std::string output = "out";
};

/// Strict loader: syntax errors and unknown or mistyped fields raise
/// ParseError naming the field; semantic problems raise one ValidationError
/// listing every violation.
ExperimentConfig parse_config(const std::string& text, const std::string& source = "config");
ExperimentConfig load_config(const std::string& path);

// Building blocks shared with the single-shot CLI commands. Each takes one
// JSON object as text.
EnvSpec parse_env_spec(const std::string& text, const std::string& source = "env");
PlannerSpec parse_planner_spec(const std::string& text, const std::string& source = "planner");
AntiRewardConfig parse_antireward_config(const std::string& text, const std::string& source = "antireward");
ObserverSpec parse_observer_spec(const std::string& text, const std::string& source = "observer");

std::string planner_name(const PlannerSpec& planner);
std::string observer_name(const ObserverSpec& observer);

struct ResultRow {
  std::string env_name;
  std::uint64_t env_seed = 0;
  std::string planner;
  std::string antireward_kind;
  std::string observer;
  std::optional<double> threshold_frac;
  std::optional<double> e_min;
  std::optional<double> achieved_return;
  std::optional<double> achieved_entropy_or_antireturn;
  std::optional<double> lambda_star;
  std::optional<double> irl_rollout_return;
  std::optional<double> irl_rollout_ratio;
  std::optional<double> pearson;
  std::optional<double> epic;
  std::optional<double> ordering_consistency;
  std::optional<double> wall_time_ms;
  // Extra columns, appended after the fixed ones.
  std::string error;
  std::optional<double> constraint_deviation;
  std::optional<double> e_star;
  std::optional<double> e_lower;  // lower end of the planner's threshold range
};

/// Header of the CSV written by write_results, in column order.
const std::vector<std::string>& result_columns();

/// Result plus the trained artifacts of one planning call.
struct PlannedCell {
  PlannerResult result;
  std::optional<RewardTable> anti_reward;
  double e_lower = 0.0;
  double e_star = 0.0;
};

/// Plans one cell exactly as run_experiment does. `anti_reward` is required
/// for the MM family except mm_mix, which generates its own.
PlannedCell plan_cell(const TabularMdp& mdp, const PlannerSpec& planner, const RewardConstraint& threshold,
                      const std::optional<RewardTable>& anti_reward, std::uint64_t seed);

/// Runs an observer against a planned policy.
RecoveredReward observe(const TabularMdp& mdp, const AnyPolicy& policy, const ObserverSpec& observer,
                        std::uint64_t seed);

/// Sweep over seed x planner x threshold x observer. Rows come back in that
/// nesting order regardless of `jobs`; a failing cell fills `error` and the
/// sweep continues.
std::vector<ResultRow> run_experiment(const ExperimentConfig& config, int jobs = 1);

std::string results_csv(const std::vector<ResultRow>& rows);
void write_results(const std::vector<ResultRow>& rows, const std::string& path);

/// One SVG per (env, planner, anti-reward kind) in `out_dir`; returns the
/// written paths.
std::vector<std::string> render_plot(const std::vector<ResultRow>& rows, const std::string& out_dir);
/// The SVG document for rows of a single (env, planner) group.
std::string render_svg(const std::vector<ResultRow>& rows, const std::string& title);

}  // namespace decoy

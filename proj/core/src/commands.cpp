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

#include "decoy/commands.hpp"

#include <filesystem>

#include "decoy/antireward.hpp"
#include "decoy/bench.hpp"
#include "decoy/io.hpp"
#include "decoy/metrics.hpp"
#include "json_util.hpp"

namespace decoy::commands {

using detail::Json;
using detail::ObjectReader;

namespace {

struct Loaded {
  Json root;
  std::filesystem::path dir;  // relative paths in the config resolve here
};

Loaded load(const Options& options) {
  require(!options.config.empty(), ErrorCode::kValidationError, "--config is required");
  Loaded l;
  l.root = detail::parse_json(io::read_file(options.config), options.config);
  l.dir = std::filesystem::path(options.config).parent_path();
  return l;
}

std::string resolve_path(const Loaded& l, const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() || l.dir.empty() ? p : (l.dir / path).string();
}

std::string out_path(const Options& options, const std::string& name) {
  return (std::filesystem::path(options.out.empty() ? "out" : options.out) / name).string();
}

// Sub-objects are re-serialized and handed to the string parsers so every
// entry point shares one schema.
EnvSpec env_of(ObjectReader& in, const Options& options) {
  EnvSpec spec = parse_env_spec(in.at("env").dump(), "env");
  if (options.seed) spec = with_seed(spec, *options.seed);
  return spec;
}

RewardConstraint threshold_of(ObjectReader& in) {
  const Json& t = in.at("threshold");
  if (t.is_number()) {
    const double frac = t.get<double>();
    require(frac >= 0.0 && frac <= 1.0, ErrorCode::kValidationError, "threshold out of [0,1]");
    return RewardConstraint::fraction(frac);
  }
  ObjectReader tin(t, "threshold");
  const double e_min = tin.number("absolute");
  tin.finish();
  return RewardConstraint::absolute(e_min);
}

std::optional<RewardTable> anti_reward_for(const TabularMdp& mdp, const PlannerSpec& planner) {
  if (!planner.antireward || planner.type == PlannerSpec::Type::kMmMix) return std::nullopt;
  return gen_anti_reward(mdp, mdp.reward(), *planner.antireward).reward;
}

}  // namespace

std::vector<std::string> plan(const Options& options) {
  const Loaded l = load(options);
  ObjectReader in(l.root, "config");
  const EnvSpec spec = env_of(in, options);
  const PlannerSpec planner = parse_planner_spec(in.at("planner").dump(), "planner");
  const RewardConstraint threshold = threshold_of(in);
  in.finish();

  const TabularMdp mdp = make_environment(spec);
  const std::uint64_t seed = std::visit([](const auto& s) { return s.seed; }, spec);
  const PlannedCell cell = plan_cell(mdp, planner, threshold, anti_reward_for(mdp, planner), seed);
  const std::vector<std::string> files{out_path(options, "plan.json"), out_path(options, "occupancy.json")};
  io::write_file(files[0], io::planner_result_to_json(cell.result, planner_name(planner)));
  io::write_file(files[1], io::occupancy_to_json(occupancy_of_policy(mdp, cell.result.policy)));
  return files;
}

std::vector<std::string> antireward(const Options& options) {
  const Loaded l = load(options);
  ObjectReader in(l.root, "config");
  const EnvSpec spec = env_of(in, options);
  const AntiRewardConfig config = parse_antireward_config(in.at("antireward").dump(), "antireward");
  in.finish();

  const TabularMdp mdp = make_environment(spec);
  const AntiReward anti = gen_anti_reward(mdp, mdp.reward(), config);
  const io::RewardProvenance provenance{to_string(config.kind), config.iterations, config.seed,
                                        config.merl_temperature};
  const std::string path = out_path(options, "antireward.json");
  io::write_file(path, io::reward_to_json(anti.reward, provenance));
  return {path};
}

std::vector<std::string> observe(const Options& options) {
  const Loaded l = load(options);
  ObjectReader in(l.root, "config");
  const EnvSpec spec = env_of(in, options);
  const std::string input = resolve_path(l, in.string("input"));
  const ObserverSpec observer = parse_observer_spec(in.at("observer").dump(), "observer");
  const std::uint64_t seed = options.seed.value_or(in.unsigned_or("seed", 0));
  in.finish();

  const TabularMdp mdp = make_environment(spec);
  // The input may be a policy, a plan result (which embeds its policy) or an
  // occupancy measure.
  const std::string text = io::read_file(input);
  const Json doc = detail::parse_json(text, input);
  require(doc.is_object(), ErrorCode::kParseError, input + ": expected an object");
  AnyPolicy policy;
  if (doc.contains("rho")) {
    policy = policy_of_occupancy(io::occupancy_from_json(text));
  } else if (doc.contains("policy")) {
    policy = io::policy_from_json(doc.at("policy").dump());
  } else {
    policy = io::policy_from_json(text);
  }
  const auto& probe = std::visit([](const auto& p) -> std::pair<int, int> { return {p.n_states(), p.n_actions()}; },
                                 policy);
  require(probe.first == mdp.n_states() && probe.second == mdp.n_actions(), ErrorCode::kDimensionMismatch,
          "input policy does not match the environment");

  const RecoveredReward recovered = decoy::observe(mdp, policy, observer, seed);
  const std::string path = out_path(options, "recovered.json");
  io::write_file(path, io::recovered_reward_to_json(recovered));
  return {path};
}

std::vector<std::string> evaluate(const Options& options) {
  const Loaded l = load(options);
  ObjectReader in(l.root, "config");
  const EnvSpec spec = env_of(in, options);
  const RewardTable reward = io::reward_from_json(io::read_file(resolve_path(l, in.string("reward"))));
  std::optional<RewardTable> reference;
  if (in.has("reference")) reference = io::reward_from_json(io::read_file(resolve_path(l, in.string("reference"))));
  MetricsRequest request;
  if (const Json* m = in.find("metrics")) {
    if (!m->is_array()) detail::type_error("config.metrics", "array of metric names", *m);
    request.pearson = request.epic = request.rollout = request.ordering = false;
    for (const Json& name : *m) {
      if (!name.is_string()) detail::type_error("config.metrics[]", "string", name);
      const std::string s = name.get<std::string>();
      if (s == "pearson") request.pearson = true;
      else if (s == "epic") request.epic = true;
      else if (s == "rollout") request.rollout = true;
      else if (s == "ordering") request.ordering = true;
      else throw Error(ErrorCode::kValidationError, "unknown metric '" + s + "'");
    }
  }
  request.ordering_pairs = in.integer_or("ordering_pairs", request.ordering_pairs);
  require(request.ordering_pairs >= 1, ErrorCode::kValidationError, "ordering_pairs must be >= 1");
  request.seed = options.seed.value_or(in.unsigned_or("seed", 0));
  in.finish();

  const TabularMdp mdp = make_environment(spec);
  const RewardTable& truth = reference ? *reference : mdp.reward();
  const MetricsReport report = evaluate_reward(mdp, truth, reward, request);
  const std::string path = out_path(options, "metrics.json");
  io::write_file(path, io::metrics_to_json(report));
  return {path};
}

std::vector<std::string> bench(const Options& options) {
  ExperimentConfig config = load_config(options.config);
  if (options.seed) config.seed = *options.seed;
  const std::string dir = options.out.empty() ? config.output : options.out;
  const std::vector<ResultRow> rows = run_experiment(config, options.jobs);
  std::vector<std::string> files{(std::filesystem::path(dir) / "results.csv").string()};
  write_results(rows, files[0]);
  for (std::string& svg : render_plot(rows, dir)) files.push_back(std::move(svg));
  return files;
}

int exit_code(const std::exception& e) {
  if (const auto* err = dynamic_cast<const Error*>(&e)) {
    switch (err->code()) {
      case ErrorCode::kParseError:
      case ErrorCode::kValidationError:
      case ErrorCode::kInvalidArgument:
      case ErrorCode::kDimensionMismatch:
      case ErrorCode::kInfeasibleThreshold:
        return 1;
      default:
        return 2;
    }
  }
  return 2;
}

}  // namespace decoy::commands

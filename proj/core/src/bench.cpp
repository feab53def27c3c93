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

#include "decoy/bench.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <thread>

#include "decoy/io.hpp"
#include "decoy/metrics.hpp"
#include "json_util.hpp"

namespace decoy {

using detail::Json;
using detail::ObjectReader;

namespace {

// Semantic problems are collected and reported together.
struct Violations {
  std::vector<std::string> items;

  void add(std::string msg) { items.push_back(std::move(msg)); }
  void check(bool ok, const std::string& msg) {
    if (!ok) add(msg);
  }
  // Runs a library validator and records its message instead of throwing.
  template <typename F>
  void capture(const std::string& where, F&& f) {
    try {
      f();
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kParseError) throw;
      add(where + ": " + e.what());
    }
  }
  void raise() const {
    if (items.empty()) return;
    std::string msg;
    for (std::size_t i = 0; i < items.size(); ++i) msg += (i ? "; " : "") + items[i];
    throw Error(ErrorCode::kValidationError, msg);
  }
};

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t mix_seed(std::initializer_list<std::uint64_t> parts) {
  std::uint64_t h = 0x243F6A8885A308D3ULL;
  for (std::uint64_t p : parts) h = splitmix64(h ^ p);
  return h;
}

std::array<double, 4> four_numbers(const Json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 4) detail::type_error(path, "array of 4 numbers", j);
  std::array<double, 4> out{};
  for (std::size_t i = 0; i < 4; ++i) out[i] = detail::as_number(j[i], path + "[" + std::to_string(i) + "]");
  return out;
}

// Either an integer or an inclusive [lo, hi] range.
void size_field(ObjectReader& in, const std::string& key, int& fixed, std::optional<std::pair<int, int>>& range,
                bool allow_range) {
  const Json* j = in.find(key);
  if (!j) return;
  if (allow_range && j->is_array()) {
    if (j->size() != 2) detail::type_error(in.child(key), "integer or [lo, hi]", *j);
    range = std::make_pair(detail::as_integer((*j)[0], in.child(key) + "[0]"),
                           detail::as_integer((*j)[1], in.child(key) + "[1]"));
    fixed = range->first;
    return;
  }
  fixed = detail::as_integer(*j, in.child(key));
}

EnvSweep env_from(const Json& j, const std::string& path, Violations& v, bool sweep) {
  ObjectReader in(j, path);
  const std::string type = in.string("type");
  EnvSweep out;
  if (sweep) {
    const Json& seeds = in.at("seeds");
    if (!seeds.is_array()) detail::type_error(in.child("seeds"), "array of integers", seeds);
    for (std::size_t i = 0; i < seeds.size(); ++i) {
      out.seeds.push_back(detail::as_unsigned(seeds[i], in.child("seeds") + "[" + std::to_string(i) + "]"));
    }
    v.check(!out.seeds.empty(), in.child("seeds") + " must not be empty");
  } else {
    out.seeds.push_back(in.unsigned_or("seed", 0));
  }

  double gamma = kDefaultGamma;
  if (type == "four_rooms") {
    FourRoomsSpec s;
    s.grid_size = in.integer_or("grid_size", s.grid_size);
    if (const Json* m = in.find("room_means")) s.room_means = four_numbers(*m, in.child("room_means"));
    if (const Json* d = in.find("room_stddevs")) s.room_stddevs = four_numbers(*d, in.child("room_stddevs"));
    s.gamma = gamma = in.number_or("gamma", s.gamma);
    out.base = s;
  } else if (type == "frozen_lake") {
    FrozenLakeSpec s;
    s.grid_size = in.integer_or("grid_size", s.grid_size);
    s.hole_fraction = in.number_or("hole_fraction", s.hole_fraction);
    s.slip = in.number_or("slip", s.slip);
    s.gamma = gamma = in.number_or("gamma", s.gamma);
    out.base = s;
  } else if (type == "random_mdp") {
    RandomMdpSpec s;
    size_field(in, "n_states", s.n_states, out.n_states_range, sweep);
    size_field(in, "n_actions", s.n_actions, out.n_actions_range, sweep);
    s.gamma = gamma = in.number_or("gamma", s.gamma);
    out.base = s;
    for (const auto* r : {&out.n_states_range, &out.n_actions_range}) {
      if (*r) v.check((*r)->first <= (*r)->second, path + ": empty size range");
    }
  } else if (type == "net_switch") {
    NetSwitchSpec s;
    s.n_configs = in.integer_or("n_configs", s.n_configs);
    s.delta = in.number_or("delta", s.delta);
    s.protection_prob = in.number_or("protection_prob", s.protection_prob);
    s.gamma = gamma = in.number_or("gamma", s.gamma);
    out.base = s;
  } else {
    throw Error(ErrorCode::kValidationError, in.child("type") + ": unknown environment '" + type +
                                                 "' (expected four_rooms, frozen_lake, random_mdp or net_switch)");
  }
  in.finish();
  v.check(gamma > 0.0 && gamma < 1.0, in.child("gamma") + " must lie in (0,1)");
  if (v.items.empty() && !out.seeds.empty()) {
    // Construction performs the family-specific range checks.
    v.capture(path, [&] {
      if (out.n_states_range || out.n_actions_range) {
        RandomMdpSpec lo = std::get<RandomMdpSpec>(out.base);
        RandomMdpSpec hi = lo;
        if (out.n_states_range) {
          lo.n_states = out.n_states_range->first;
          hi.n_states = out.n_states_range->second;
        }
        if (out.n_actions_range) {
          lo.n_actions = out.n_actions_range->first;
          hi.n_actions = out.n_actions_range->second;
        }
        make_random_mdp(lo);
        make_random_mdp(hi);
      } else {
        make_environment(with_seed(out.base, out.seeds.front()));
      }
    });
  }
  return out;
}

AntiRewardConfig antireward_from(const Json& j, const std::string& path, Violations& v) {
  ObjectReader in(j, path);
  AntiRewardConfig c;
  const std::string kind = in.string("kind");
  v.capture(in.child("kind"), [&] { c.kind = parse_anti_reward_kind(kind); });
  c.iterations = in.integer_or("iterations", c.iterations);
  c.smoothing_eps = in.number_or("smoothing_eps", c.smoothing_eps);
  if (const Json* clip = in.find("clip")) {
    if (!clip->is_array() || clip->size() != 2) detail::type_error(in.child("clip"), "[lo, hi]", *clip);
    c.clip = std::make_pair(detail::as_number((*clip)[0], in.child("clip") + "[0]"),
                            detail::as_number((*clip)[1], in.child("clip") + "[1]"));
  }
  c.merl_temperature = in.number_or("merl_temperature", c.merl_temperature);
  const std::string init = in.string_or("init", "uniform");
  if (init == "uniform") {
    c.init = OccupancyInit::kUniform;
  } else if (init == "random") {
    c.init = OccupancyInit::kRandom;
  } else {
    v.add(in.child("init") + ": expected 'uniform' or 'random'");
  }
  c.critic_iterations = in.integer_or("critic_iterations", c.critic_iterations);
  c.seed = in.unsigned_or("seed", c.seed);
  in.finish();
  v.capture(path, [&] { validate(c); });
  return c;
}

MmMode mm_mode(const std::string& s, const std::string& path, Violations& v) {
  if (s == "exact") return MmMode::kExact;
  if (s == "feasible") return MmMode::kFeasible;
  v.add(path + ": expected 'exact' or 'feasible'");
  return MmMode::kExact;
}

PlannerSpec planner_from(const Json& j, const std::string& path, Violations& v) {
  ObjectReader in(j, path);
  PlannerSpec p;
  const std::string type = in.string("type");
  if (type == "meir") {
    p.type = PlannerSpec::Type::kMeir;
  } else if (type == "mm") {
    p.type = PlannerSpec::Type::kMm;
  } else if (type == "mmbe") {
    p.type = PlannerSpec::Type::kMmbe;
  } else if (type == "mm_mix") {
    p.type = PlannerSpec::Type::kMmMix;
  } else if (type == "dqfn" || type == "iq_learn") {
    throw Error(ErrorCode::kValidationError,
                in.child("type") + ": '" + type + "' is not supported (neural baselines are out of scope)");
  } else {
    throw Error(ErrorCode::kValidationError, in.child("type") + ": unknown planner '" + type +
                                                 "' (expected meir, mm, mmbe or mm_mix)");
  }
  p.label = in.string_or("label", "");
  if (const Json* a = in.find("antireward")) {
    if (p.type == PlannerSpec::Type::kMeir) {
      v.add(in.child("antireward") + ": meir takes no anti-reward");
    } else {
      p.antireward = antireward_from(*a, in.child("antireward"), v);
    }
  } else if (p.type != PlannerSpec::Type::kMeir) {
    v.add(in.child("antireward") + ": required for planner '" + type + "'");
  }

  static const Json kEmpty = Json::object();
  const Json* params_json = in.find("params");
  ObjectReader params(params_json ? *params_json : kEmpty, in.child("params"));
  switch (p.type) {
    case PlannerSpec::Type::kMeir:
      p.meir.return_tol = params.number_or("return_tol", p.meir.return_tol);
      p.meir.lambda_cap = params.number_or("lambda_cap", p.meir.lambda_cap);
      v.check(p.meir.return_tol > 0.0, params.child("return_tol") + " must be positive");
      v.check(p.meir.lambda_cap >= 0.0, params.child("lambda_cap") + " must be non-negative");
      break;
    case PlannerSpec::Type::kMm: {
      const std::string solver = params.string_or("solver", "binary_search");
      if (solver == "primal_dual") {
        p.primal_dual = true;
        p.primal_dual_options.alpha = params.number_or("alpha", p.primal_dual_options.alpha);
        p.primal_dual_options.iterations = params.integer_or("iterations", p.primal_dual_options.iterations);
        v.check(p.primal_dual_options.alpha > 0.0, params.child("alpha") + " must be positive");
        v.check(p.primal_dual_options.iterations >= 2, params.child("iterations") + " must be >= 2");
      } else if (solver != "binary_search") {
        v.add(params.child("solver") + ": expected 'binary_search' or 'primal_dual'");
      }
      if (params.has("mode")) p.mm.mode = mm_mode(params.string("mode"), params.child("mode"), v);
      p.mm.lambda_max = params.number_or("lambda_max", p.mm.lambda_max);
      p.mm.eps = params.number_or("eps", p.mm.eps);
      break;
    }
    case PlannerSpec::Type::kMmbe:
      p.beta = params.number_or("beta", p.beta);
      p.mm.lambda_max = params.number_or("lambda_max", p.mm.lambda_max);
      p.mm.eps = params.number_or("eps", p.mm.eps);
      v.check(p.beta > 0.0, params.child("beta") + " must be positive");
      break;
    case PlannerSpec::Type::kMmMix:
      p.mix.n_mix = params.integer_or("n_mix", p.mix.n_mix);
      v.check(p.mix.n_mix >= 1, params.child("n_mix") + " must be >= 1");
      if (const Json* seeds = params.find("seeds")) {
        if (!seeds->is_array()) detail::type_error(params.child("seeds"), "array of integers", *seeds);
        for (std::size_t i = 0; i < seeds->size(); ++i) {
          p.mix.seeds.push_back(detail::as_unsigned((*seeds)[i], params.child("seeds") + "[" + std::to_string(i) + "]"));
        }
        v.check(static_cast<int>(p.mix.seeds.size()) == p.mix.n_mix, params.child("seeds") + " must have n_mix entries");
      }
      if (params.has("member_mode")) p.mix.member.mode = mm_mode(params.string("member_mode"), params.child("member_mode"), v);
      break;
  }
  v.check(p.mm.lambda_max >= 0.0, params.child("lambda_max") + " must be non-negative");
  v.check(p.mm.eps > 0.0 && p.mm.eps < 1.0, params.child("eps") + " must lie in (0,1)");
  params.finish();
  in.finish();
  return p;
}

IrlConfig irl_from(const Json& j, const std::string& path, Violations& v) {
  ObjectReader in(j, path);
  IrlConfig c;
  c.learning_rate = in.number_or("learning_rate", c.learning_rate);
  c.lr_decay = in.number_or("lr_decay", c.lr_decay);
  c.max_iters = in.integer_or("max_iters", c.max_iters);
  c.grad_tol = in.number_or("grad_tol", c.grad_tol);
  const std::string init = in.string_or("init", "zero");
  if (init == "zero") {
    c.init = IrlConfig::Init::kZero;
  } else if (init == "seeded_uniform") {
    c.init = IrlConfig::Init::kSeededUniform;
  } else {
    v.add(in.child("init") + ": expected 'zero' or 'seeded_uniform'");
  }
  c.seed = in.unsigned_or("seed", c.seed);
  // The benchmark families all carry state rewards, so the observer ties
  // rewards across actions unless told otherwise.
  const std::string features = in.string_or("features", "state");
  if (features == "state") {
    c.features = IrlConfig::Features::kState;
  } else if (features == "state_action") {
    c.features = IrlConfig::Features::kStateAction;
  } else {
    v.add(in.child("features") + ": expected 'state' or 'state_action'");
  }
  in.finish();
  v.capture(path, [&] { validate(c); });
  return c;
}

ObserverSpec observer_from(const Json& j, const std::string& path, Violations& v) {
  ObjectReader in(j, path);
  ObserverSpec o;
  const std::string type = in.string("type");
  if (type == "mce_true") {
    o.type = ObserverSpec::Type::kMceTrue;
  } else if (type == "mce_demos") {
    o.type = ObserverSpec::Type::kMceDemos;
  } else if (type == "irl_max") {
    o.type = ObserverSpec::Type::kIrlMax;
  } else if (type == "irl_random") {
    o.type = ObserverSpec::Type::kIrlRandom;
  } else if (type == "iq_learn") {
    throw Error(ErrorCode::kValidationError,
                in.child("type") + ": 'iq_learn' is not supported (neural baselines are out of scope)");
  } else {
    throw Error(ErrorCode::kValidationError, in.child("type") + ": unknown observer '" + type +
                                                 "' (expected mce_true, mce_demos, irl_max or irl_random)");
  }
  static const Json kEmpty = Json::object();
  const Json* irl = in.find("irl");
  o.irl = irl_from(irl ? *irl : kEmpty, in.child("irl"), v);
  if (o.type == ObserverSpec::Type::kMceDemos) {
    o.n_demos = in.integer_or("n", o.n_demos);
    o.horizon = in.integer_or("horizon", o.horizon);
    v.check(o.n_demos >= 1, in.child("n") + " must be >= 1");
    v.check(o.horizon >= 0, in.child("horizon") + " must be >= 0");
  }
  if (o.type == ObserverSpec::Type::kIrlMax || o.type == ObserverSpec::Type::kIrlRandom) {
    o.mass_threshold = in.number_or("mass_threshold", o.mass_threshold);
    v.check(o.mass_threshold > 0.0 && o.mass_threshold < 1.0, in.child("mass_threshold") + " must lie in (0,1)");
  }
  in.finish();
  return o;
}

RewardConstraint threshold_from(const Json& j, const std::string& path, Violations& v) {
  if (j.is_number()) {
    const double frac = j.get<double>();
    v.check(frac >= 0.0 && frac <= 1.0, path + " out of [0,1]");
    return RewardConstraint::fraction(frac);
  }
  ObjectReader in(j, path);
  const double e_min = in.number("absolute");
  in.finish();
  v.check(std::isfinite(e_min), path + ".absolute must be finite");
  return RewardConstraint::absolute(e_min);
}

template <typename T, typename F>
std::vector<T> list_from(ObjectReader& in, const std::string& key, Violations& v, F&& parse) {
  const Json& arr = in.at(key);
  if (!arr.is_array()) detail::type_error(in.child(key), "array", arr);
  std::vector<T> out;
  for (std::size_t i = 0; i < arr.size(); ++i) out.push_back(parse(arr[i], key + "[" + std::to_string(i) + "]", v));
  v.check(!out.empty(), key + " must not be empty");
  return out;
}

template <typename T, typename F>
T parse_single(const std::string& text, const std::string& source, F&& parse) {
  const Json j = detail::parse_json(text, source);
  Violations v;
  T out = parse(j, source, v);
  v.raise();
  return out;
}

}  // namespace

EnvSpec EnvSweep::spec_for(std::uint64_t seed) const {
  EnvSpec spec = with_seed(base, seed);
  if (n_states_range || n_actions_range) {
    auto& s = std::get<RandomMdpSpec>(spec);
    std::mt19937_64 rng(mix_seed({seed, 0x53495A45ULL}));
    if (n_states_range) s.n_states = std::uniform_int_distribution<int>(n_states_range->first, n_states_range->second)(rng);
    if (n_actions_range) {
      s.n_actions = std::uniform_int_distribution<int>(n_actions_range->first, n_actions_range->second)(rng);
    }
  }
  return spec;
}

ExperimentConfig parse_config(const std::string& text, const std::string& source) {
  const Json j = detail::parse_json(text, source);
  ObjectReader in(j, source);
  Violations v;
  ExperimentConfig c;
  c.env = env_from(in.at("env"), "env", v, true);
  c.planners = list_from<PlannerSpec>(in, "planners", v, planner_from);
  c.thresholds = list_from<RewardConstraint>(in, "thresholds", v, threshold_from);
  c.observers = list_from<ObserverSpec>(in, "observers", v, observer_from);
  if (const Json* m = in.find("metrics")) {
    if (!m->is_array()) detail::type_error(in.child("metrics"), "array of metric names", *m);
    c.metrics = MetricSelection{false, false, false, false};
    for (std::size_t i = 0; i < m->size(); ++i) {
      const std::string path = "metrics[" + std::to_string(i) + "]";
      if (!(*m)[i].is_string()) detail::type_error(path, "string", (*m)[i]);
      const std::string name = (*m)[i].get<std::string>();
      if (name == "pearson") c.metrics.pearson = true;
      else if (name == "epic") c.metrics.epic = true;
      else if (name == "rollout") c.metrics.rollout = true;
      else if (name == "ordering") c.metrics.ordering = true;
      else v.add(path + ": unknown metric '" + name + "'");
    }
  }
  c.ordering_pairs = in.integer_or("ordering_pairs", c.ordering_pairs);
  v.check(c.ordering_pairs >= 1, "ordering_pairs must be >= 1");
  c.seed = in.unsigned_or("seed", c.seed);
  c.record_wall_time = in.boolean_or("record_wall_time", c.record_wall_time);
  c.output = in.string_or("output", c.output);
  in.finish();
  v.raise();
  return c;
}

ExperimentConfig load_config(const std::string& path) { return parse_config(io::read_file(path), path); }

EnvSpec parse_env_spec(const std::string& text, const std::string& source) {
  const EnvSweep sweep = parse_single<EnvSweep>(
      text, source, [](const Json& j, const std::string& p, Violations& v) { return env_from(j, p, v, false); });
  return sweep.spec_for(sweep.seeds.front());
}

PlannerSpec parse_planner_spec(const std::string& text, const std::string& source) {
  return parse_single<PlannerSpec>(text, source, planner_from);
}

AntiRewardConfig parse_antireward_config(const std::string& text, const std::string& source) {
  return parse_single<AntiRewardConfig>(text, source, antireward_from);
}

ObserverSpec parse_observer_spec(const std::string& text, const std::string& source) {
  return parse_single<ObserverSpec>(text, source, observer_from);
}

std::string planner_name(const PlannerSpec& planner) {
  if (!planner.label.empty()) return planner.label;
  switch (planner.type) {
    case PlannerSpec::Type::kMeir: return "meir";
    case PlannerSpec::Type::kMm: return planner.primal_dual ? "mm_primal_dual" : "mm";
    case PlannerSpec::Type::kMmbe: return "mmbe";
    case PlannerSpec::Type::kMmMix: return "mm_mix";
  }
  return "unknown";
}

std::string observer_name(const ObserverSpec& observer) {
  switch (observer.type) {
    case ObserverSpec::Type::kMceTrue: return "mce_true";
    case ObserverSpec::Type::kMceDemos: return "mce_demos";
    case ObserverSpec::Type::kIrlMax: return "irl_max";
    case ObserverSpec::Type::kIrlRandom: return "irl_random";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// Sweep

PlannedCell plan_cell(const TabularMdp& mdp, const PlannerSpec& planner, const RewardConstraint& threshold,
                      const std::optional<RewardTable>& anti_reward, std::uint64_t seed) {
  const RewardTable& r = mdp.reward();
  PlannedCell out;
  if (planner.type == PlannerSpec::Type::kMeir) {
    const ReferenceReturns ref = reference_returns(mdp, r);
    out.e_lower = ref.e_hat;
    out.e_star = ref.e_star;
    out.result = meir(mdp, r, threshold, planner.meir);
    return out;
  }
  require(planner.antireward.has_value(), ErrorCode::kInvalidArgument, "planner needs an anti-reward config");
  if (planner.type == PlannerSpec::Type::kMmMix) {
    AntiRewardConfig base = *planner.antireward;
    auto generator = [&](std::uint64_t member_seed) {
      AntiRewardConfig c = base;
      c.seed = mix_seed({seed, member_seed});
      return gen_anti_reward(mdp, r, c).reward;
    };
    MmMixResult mix = mm_mix(mdp, r, generator, threshold, planner.mix);
    double lower = -std::numeric_limits<double>::infinity();
    for (const auto& anti : mix.anti_rewards) {
      const ReferenceReturns ref = reference_returns(mdp, r, &anti);
      lower = std::max(lower, std::min(*ref.e_minus, ref.e_star));
      out.e_star = ref.e_star;
    }
    out.e_lower = lower;
    out.result = std::move(mix.result);
    return out;
  }
  require(anti_reward.has_value(), ErrorCode::kInvalidArgument, "missing anti-reward");
  const ReferenceReturns ref = reference_returns(mdp, r, &*anti_reward);
  out.anti_reward = anti_reward;
  out.e_lower = std::min(*ref.e_minus, ref.e_star);
  out.e_star = ref.e_star;
  if (planner.type == PlannerSpec::Type::kMm) {
    out.result = planner.primal_dual ? mm_primal_dual(mdp, r, *anti_reward, threshold, planner.primal_dual_options)
                                     : mm_binary_search(mdp, r, *anti_reward, threshold, planner.mm);
  } else {
    out.result = mmbe(mdp, r, *anti_reward, threshold, planner.beta, planner.mm);
  }
  return out;
}

RecoveredReward observe(const TabularMdp& mdp, const AnyPolicy& policy, const ObserverSpec& observer,
                        std::uint64_t seed) {
  // The observer never sees the true reward.
  const TabularMdp dynamics = mdp.with_reward(RewardTable::zeros(mdp.n_states(), mdp.n_actions()));
  switch (observer.type) {
    case ObserverSpec::Type::kMceTrue:
      return mce_irl(dynamics, occupancy_of_policy(mdp, policy), observer.irl);
    case ObserverSpec::Type::kMceDemos: {
      const int horizon = observer.horizon > 0 ? observer.horizon : truncation_horizon(mdp.gamma());
      const auto demos = sample_trajectories(mdp, policy, observer.n_demos, horizon, seed);
      return irl_from_demos(dynamics, demos, mdp.gamma(), observer.irl);
    }
    case ObserverSpec::Type::kIrlMax:
    case ObserverSpec::Type::kIrlRandom: {
      const ClusterMode mode = observer.type == ObserverSpec::Type::kIrlMax ? ClusterMode::kMax : ClusterMode::kRandom;
      return irl_clustered(dynamics, occupancy_of_policy(mdp, policy), observer.irl, mode, seed,
                           observer.mass_threshold)
          .recovered;
    }
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown observer");
}

namespace {

struct Group {
  std::size_t seed_index;
  std::size_t planner_index;
};

void run_group(const ExperimentConfig& config, const Group& g, std::vector<ResultRow>& rows, std::size_t first_row) {
  const std::uint64_t env_seed = config.env.seeds[g.seed_index];
  const PlannerSpec& planner = config.planners[g.planner_index];
  const EnvSpec spec = config.env.spec_for(env_seed);
  const std::size_t n_obs = config.observers.size();

  // Fill the identifying columns first so failures still produce full rows.
  for (std::size_t t = 0; t < config.thresholds.size(); ++t) {
    for (std::size_t o = 0; o < n_obs; ++o) {
      ResultRow& row = rows[first_row + t * n_obs + o];
      row.env_name = environment_name(spec);
      row.env_seed = env_seed;
      row.planner = planner_name(planner);
      row.antireward_kind = planner.antireward ? to_string(planner.antireward->kind) : "";
      row.observer = observer_name(config.observers[o]);
      const RewardConstraint& c = config.thresholds[t];
      if (c.kind == RewardConstraint::Kind::kFraction) row.threshold_frac = c.value;
    }
  }
  auto fail_range = [&](std::size_t begin, std::size_t end, const std::string& msg) {
    for (std::size_t i = begin; i < end; ++i) rows[first_row + i].error = msg;
  };
  const std::size_t group_rows = config.thresholds.size() * n_obs;

  std::optional<TabularMdp> mdp;
  std::optional<RewardTable> anti;
  try {
    mdp = make_environment(spec);
    if (planner.antireward && planner.type != PlannerSpec::Type::kMmMix) {
      AntiRewardConfig ac = *planner.antireward;
      ac.seed = mix_seed({config.seed, env_seed, ac.seed});
      anti = gen_anti_reward(*mdp, mdp->reward(), ac).reward;
    }
  } catch (const std::exception& e) {
    fail_range(0, group_rows, e.what());
    return;
  }

  MetricsRequest request;
  request.pearson = config.metrics.pearson;
  request.epic = config.metrics.epic;
  request.rollout = config.metrics.rollout;
  request.ordering = config.metrics.ordering;
  request.ordering_pairs = config.ordering_pairs;
  request.seed = mix_seed({config.seed, env_seed, 0x4F524452ULL});

  for (std::size_t t = 0; t < config.thresholds.size(); ++t) {
    const auto plan_start = std::chrono::steady_clock::now();
    std::optional<PlannedCell> cell;
    try {
      cell = plan_cell(*mdp, planner, config.thresholds[t], anti, mix_seed({config.seed, env_seed, g.planner_index}));
    } catch (const std::exception& e) {
      fail_range(t * n_obs, (t + 1) * n_obs, e.what());
      continue;
    }
    const double plan_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - plan_start).count();
    for (std::size_t o = 0; o < n_obs; ++o) {
      ResultRow& row = rows[first_row + t * n_obs + o];
      const PlannerResult& res = cell->result;
      row.e_min = res.e_min;
      row.achieved_return = res.achieved_return;
      row.achieved_entropy_or_antireturn = res.achieved_objective;
      row.lambda_star = res.lambda_star;
      row.constraint_deviation = res.constraint_deviation();
      row.e_star = cell->e_star;
      row.e_lower = cell->e_lower;
      const auto start = std::chrono::steady_clock::now();
      try {
        const std::uint64_t obs_seed = mix_seed({config.seed, env_seed, g.planner_index, t, o});
        const RecoveredReward recovered = observe(*mdp, res.policy, config.observers[o], obs_seed);
        const MetricsReport report = evaluate_reward(*mdp, mdp->reward(), recovered.reward, request);
        row.irl_rollout_return = report.rollout_return;
        row.irl_rollout_ratio = report.rollout_ratio;
        row.pearson = report.pearson;
        row.epic = report.epic;
        row.ordering_consistency = report.ordering_consistency;
      } catch (const std::exception& e) {
        row.error = e.what();
      }
      if (config.record_wall_time) {
        row.wall_time_ms =
            plan_ms + std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
      }
    }
  }
}

}  // namespace

std::vector<ResultRow> run_experiment(const ExperimentConfig& config, int jobs) {
  std::vector<Group> groups;
  for (std::size_t s = 0; s < config.env.seeds.size(); ++s) {
    for (std::size_t p = 0; p < config.planners.size(); ++p) groups.push_back({s, p});
  }
  const std::size_t per_group = config.thresholds.size() * config.observers.size();
  std::vector<ResultRow> rows(groups.size() * per_group);

  const int workers = std::max(1, std::min<int>(jobs, static_cast<int>(groups.size())));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < groups.size(); i = next++) run_group(config, groups[i], rows, i * per_group);
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  return rows;
}

// ---------------------------------------------------------------------------
// CSV

const std::vector<std::string>& result_columns() {
  static const std::vector<std::string> kColumns{
      "env_name",     "env_seed",       "planner",    "antireward_kind",
      "observer",     "threshold_frac", "e_min",      "achieved_return",
      "achieved_entropy_or_antireturn", "lambda_star", "irl_rollout_return", "irl_rollout_ratio",
      "pearson",      "epic",           "ordering_consistency", "wall_time_ms",
      "error",        "constraint_deviation", "e_star", "e_lower"};
  return kColumns;
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string csv_number(const std::optional<double>& v) {
  if (!v || !std::isfinite(*v)) return "";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", *v == 0.0 ? 0.0 : *v);  // no "-0"
  return buf;
}

}  // namespace

std::string results_csv(const std::vector<ResultRow>& rows) {
  std::string out;
  const auto& cols = result_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) out += (i ? "," : "") + cols[i];
  out += "\n";
  for (const ResultRow& r : rows) {
    const std::vector<std::string> fields{
        csv_field(r.env_name),
        std::to_string(r.env_seed),
        csv_field(r.planner),
        csv_field(r.antireward_kind),
        csv_field(r.observer),
        csv_number(r.threshold_frac),
        csv_number(r.e_min),
        csv_number(r.achieved_return),
        csv_number(r.achieved_entropy_or_antireturn),
        csv_number(r.lambda_star),
        csv_number(r.irl_rollout_return),
        csv_number(r.irl_rollout_ratio),
        csv_number(r.pearson),
        csv_number(r.epic),
        csv_number(r.ordering_consistency),
        csv_number(r.wall_time_ms),
        csv_field(r.error),
        csv_number(r.constraint_deviation),
        csv_number(r.e_star),
        csv_number(r.e_lower),
    };
    for (std::size_t i = 0; i < fields.size(); ++i) out += (i ? "," : "") + fields[i];
    out += "\n";
  }
  return out;
}

void write_results(const std::vector<ResultRow>& rows, const std::string& path) {
  io::write_file(path, results_csv(rows));
}

}  // namespace decoy

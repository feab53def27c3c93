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

#include "decoy/planners.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace decoy {

double RewardConstraint::resolve(double lower, double upper) const {
  const double slack = 1e-9 * (1.0 + std::abs(lower) + std::abs(upper));
  if (kind == Kind::kFraction) {
    require(value >= 0.0 && value <= 1.0, ErrorCode::kInfeasibleThreshold,
            "threshold fraction " + std::to_string(value) + " outside [0,1]");
    return lower + value * (upper - lower);
  }
  require(value >= lower - slack && value <= upper + slack, ErrorCode::kInfeasibleThreshold,
          "e_min " + std::to_string(value) + " outside [" + std::to_string(lower) + ", " + std::to_string(upper) + "]");
  return std::clamp(value, lower, upper);
}

ReferenceReturns reference_returns(const TabularMdp& mdp, const RewardTable& reward, const RewardTable* anti_reward) {
  ReferenceReturns out;
  const auto uniform = StochasticPolicy::uniform(mdp.n_states(), mdp.n_actions());
  out.e_hat = expected_return(occupancy_of_policy(mdp, uniform), reward);
  out.e_star = expected_return(occupancy_of_policy(mdp, solve_optimal(mdp, reward).policy), reward);
  if (anti_reward != nullptr) {
    out.e_minus = expected_return(occupancy_of_policy(mdp, solve_optimal(mdp, *anti_reward).policy), reward);
  }
  return out;
}

// ---------------------------------------------------------------------------
// MEIR

namespace {

struct SoftProbe {
  SoftSolution solution;
  OccupancyMeasure occupancy;
  double ret = 0.0;
};

SoftProbe probe_soft(const TabularMdp& mdp, const RewardTable& reward, double lambda, double tol,
                     const Vector* warm) {
  SoftSolution sol = soft_value_iteration(mdp, reward.scaled(lambda), tol, warm);
  OccupancyMeasure occ = occupancy_of_policy(mdp, sol.policy);
  const double ret = expected_return(occ, reward);
  return {std::move(sol), std::move(occ), ret};
}

PlannerResult finish_meir(SoftProbe probe, double e_min, double lambda, int iterations, bool converged) {
  PlannerResult out;
  out.e_min = e_min;
  out.lambda_star = lambda;
  out.achieved_return = probe.ret;
  out.achieved_objective = causal_entropy(probe.occupancy);
  out.iterations = iterations;
  out.converged = converged;
  out.q_table = std::move(probe.solution.q);
  out.policy = std::move(probe.solution.policy);
  return out;
}

}  // namespace

PlannerResult meir(const TabularMdp& mdp, const RewardTable& reward, const RewardConstraint& constraint,
                   const MeirOptions& options) {
  const ReferenceReturns ref = reference_returns(mdp, reward);
  const double e_min = constraint.resolve(ref.e_hat, ref.e_star);
  const double gap = ref.e_star - ref.e_hat;

  if (e_min <= ref.e_hat || gap <= 0.0) {
    return finish_meir(probe_soft(mdp, reward, 0.0, options.soft_tol, nullptr), e_min, 0.0, 1, true);
  }
  const double cap = options.lambda_cap > 0.0 ? options.lambda_cap : 1e6 / gap;

  // Grow the upper bracket geometrically; soft return is increasing in lambda.
  double lo = 0.0;
  double hi = std::min(1.0 / gap, cap);
  int iterations = 0;
  SoftProbe upper = probe_soft(mdp, reward, hi, options.soft_tol, nullptr);
  while (upper.ret < e_min && hi < cap) {
    lo = hi;
    hi = std::min(2.0 * hi, cap);
    upper = probe_soft(mdp, reward, hi, options.soft_tol, &upper.solution.v);
    ++iterations;
  }
  if (upper.ret < e_min) {
    // Only the limit lambda -> infinity reaches E*; report the cap policy.
    return finish_meir(std::move(upper), e_min, hi, iterations, false);
  }

  while (upper.ret - e_min > options.return_tol && iterations < 500) {
    const double mid = 0.5 * (lo + hi);
    SoftProbe probe = probe_soft(mdp, reward, mid, options.soft_tol, &upper.solution.v);
    ++iterations;
    if (probe.ret < e_min) {
      lo = mid;
    } else {
      hi = mid;
      upper = std::move(probe);
    }
    if (hi - lo <= 1e-15 * hi) break;
  }
  const bool converged = upper.ret - e_min <= options.return_tol;
  return finish_meir(std::move(upper), e_min, hi, iterations, converged);
}

// ---------------------------------------------------------------------------
// Max Misinformation

namespace {

struct HardProbe {
  OptimalSolution solution;
  OccupancyMeasure occupancy;
  double ret = 0.0;
};

HardProbe probe_hard(const TabularMdp& mdp, const RewardTable& reward, const RewardTable& anti_reward,
                     double lambda) {
  OptimalSolution sol = solve_optimal(mdp, reward.scaled(lambda) + anti_reward);
  OccupancyMeasure occ = occupancy_of_policy(mdp, sol.policy);
  const double ret = expected_return(occ, reward);
  return {std::move(sol), std::move(occ), ret};
}

double feasibility_slack(double e_min) { return 1e-12 * (1.0 + std::abs(e_min)); }

double default_lambda_max(const RewardTable& reward, const RewardTable& anti_reward) {
  double spread = reward.values().maxCoeff() - reward.values().minCoeff();
  if (spread <= 0.0) spread = 1.0;
  return 1e6 * (anti_reward.values().cwiseAbs().maxCoeff() + 1.0) / spread;
}

PlannerResult single_policy_result(HardProbe probe, const RewardTable& anti_reward, double e_min, double lambda,
                                   int iterations) {
  PlannerResult out;
  out.e_min = e_min;
  out.lambda_star = lambda;
  out.achieved_return = probe.ret;
  out.achieved_objective = expected_return(probe.occupancy, anti_reward);
  out.iterations = iterations;
  out.converged = true;
  out.q_table = std::move(probe.solution.q);
  out.policy = std::move(probe.solution.policy);
  return out;
}

struct Bracket {
  HardProbe lower;  // return below e_min
  HardProbe upper;  // return at or above e_min
  double lambda_lower;
  double lambda_upper;
  int iterations;
};

}  // namespace

PlannerResult mm_binary_search(const TabularMdp& mdp, const RewardTable& reward, const RewardTable& anti_reward,
                               const RewardConstraint& constraint, const MmOptions& options) {
  const ReferenceReturns ref = reference_returns(mdp, reward, &anti_reward);
  const double e_lo = std::min(*ref.e_minus, ref.e_star);
  const double e_min = constraint.resolve(e_lo, ref.e_star);

  HardProbe at_zero = probe_hard(mdp, reward, anti_reward, 0.0);
  if (at_zero.ret >= e_min - feasibility_slack(e_min)) {
    return single_policy_result(std::move(at_zero), anti_reward, e_min, 0.0, 1);
  }

  const double lambda_max = options.lambda_max > 0.0 ? options.lambda_max : default_lambda_max(reward, anti_reward);
  HardProbe at_max = probe_hard(mdp, reward, anti_reward, lambda_max);
  if (at_max.ret < e_min - feasibility_slack(e_min)) {
    throw Error(ErrorCode::kLambdaCapTooSmall,
                "policy at lambda_max=" + std::to_string(lambda_max) + " returns " + std::to_string(at_max.ret) +
                    " < e_min=" + std::to_string(e_min));
  }

  // Invariant: return(lower) < e_min <= return(upper). Terminates on bracket
  // width because the return is a step function of lambda.
  Bracket b{std::move(at_zero), std::move(at_max), 0.0, lambda_max, 2};
  while (b.lambda_upper - b.lambda_lower > options.eps * b.lambda_upper && b.iterations < 400) {
    const double mid = 0.5 * (b.lambda_lower + b.lambda_upper);
    HardProbe probe = probe_hard(mdp, reward, anti_reward, mid);
    ++b.iterations;
    if (probe.ret < e_min - feasibility_slack(e_min)) {
      b.lower = std::move(probe);
      b.lambda_lower = mid;
    } else {
      b.upper = std::move(probe);
      b.lambda_upper = mid;
    }
  }

  const double upper_excess = b.upper.ret - e_min;
  if (options.mode == MmMode::kFeasible || upper_excess <= feasibility_slack(e_min)) {
    return single_policy_result(std::move(b.upper), anti_reward, e_min, b.lambda_upper, b.iterations);
  }

  // Both bracket policies are optimal for the Lagrangian at the breakpoint, so
  // the mixture meeting the floor with equality is optimal for the program.
  const double w = (e_min - b.lower.ret) / (b.upper.ret - b.lower.ret);
  Matrix rho = w * b.upper.occupancy.rho() + (1.0 - w) * b.lower.occupancy.rho();
  const OccupancyMeasure mixed_occ(rho / rho.sum());

  PlannerResult out;
  out.e_min = e_min;
  out.lambda_star = b.lambda_upper;
  out.achieved_return = std::max(expected_return(mixed_occ, reward), w * b.upper.ret + (1.0 - w) * b.lower.ret);
  out.achieved_objective = expected_return(mixed_occ, anti_reward);
  out.iterations = b.iterations;
  out.converged = true;
  out.q_table = b.upper.solution.q;
  Vector weights(2);
  weights << w, 1.0 - w;
  out.policy = MixedPolicy({std::move(b.upper.solution.policy), std::move(b.lower.solution.policy)}, weights);
  return out;
}

PlannerResult mm_primal_dual(const TabularMdp& mdp, const RewardTable& reward, const RewardTable& anti_reward,
                             const RewardConstraint& constraint, const PrimalDualOptions& options) {
  require(options.alpha > 0.0, ErrorCode::kInvalidArgument, "alpha must be positive");
  require(options.iterations >= 1, ErrorCode::kInvalidArgument, "need at least one iteration");
  const ReferenceReturns ref = reference_returns(mdp, reward, &anti_reward);
  const double e_min = constraint.resolve(std::min(*ref.e_minus, ref.e_star), ref.e_star);

  double lambda = std::max(0.0, options.lambda0);
  std::vector<double> lambdas;
  lambdas.reserve(static_cast<std::size_t>(options.iterations));
  // Distinct primal iterates from the averaging window, keyed by action list.
  std::map<std::vector<int>, std::pair<int, StochasticPolicy>> tail;
  const int tail_start = options.iterations / 2;

  for (int t = 0; t < options.iterations; ++t) {
    HardProbe probe = probe_hard(mdp, reward, anti_reward, lambda);
    if (t >= tail_start) {
      std::vector<int> key(static_cast<std::size_t>(mdp.n_states()));
      for (int s = 0; s < mdp.n_states(); ++s) key[static_cast<std::size_t>(s)] = probe.solution.policy.argmax(s);
      auto [it, inserted] = tail.try_emplace(key, 0, probe.solution.policy);
      ++it->second.first;
    }
    lambda = std::max(0.0, lambda - options.alpha * (probe.ret - e_min));
    lambdas.push_back(lambda);
  }

  std::vector<StochasticPolicy> members;
  Vector weights(static_cast<Eigen::Index>(tail.size()));
  const double count = options.iterations - tail_start;
  for (auto& [key, entry] : tail) {
    weights(static_cast<Eigen::Index>(members.size())) = entry.first / count;
    members.push_back(std::move(entry.second));
  }
  weights /= weights.sum();
  MixResult mix = mix_policies(std::move(members), weights, mdp);

  const auto window = static_cast<std::size_t>(std::clamp(options.window, 1, options.iterations));
  const auto [lo_it, hi_it] = std::minmax_element(lambdas.end() - static_cast<std::ptrdiff_t>(window), lambdas.end());

  PlannerResult out;
  out.e_min = e_min;
  out.lambda_star = lambda;
  out.achieved_return = expected_return(mix.occupancy, reward);
  out.achieved_objective = expected_return(mix.occupancy, anti_reward);
  out.iterations = options.iterations;
  out.converged = (*hi_it - *lo_it) < options.oscillation_tol;
  if (mix.policy.members().size() == 1) {
    out.policy = mix.policy.members().front();
  } else {
    out.policy = std::move(mix.policy);
  }
  return out;
}

PlannerResult mmbe(const TabularMdp& mdp, const RewardTable& reward, const RewardTable& anti_reward,
                   const RewardConstraint& constraint, double beta, const MmOptions& options) {
  require(beta > 0.0, ErrorCode::kInvalidArgument, "beta must be positive");
  MmOptions feasible = options;
  feasible.mode = MmMode::kFeasible;
  const PlannerResult mm = mm_binary_search(mdp, reward, anti_reward, constraint, feasible);

  const RewardTable combined = reward.scaled(mm.lambda_star) + anti_reward;
  OptimalSolution sol = solve_optimal(mdp, combined);
  StochasticPolicy policy = boltzmann_policy(sol.q, beta);
  const OccupancyMeasure occ = occupancy_of_policy(mdp, policy);

  PlannerResult out;
  out.e_min = mm.e_min;
  out.lambda_star = mm.lambda_star;
  out.achieved_return = expected_return(occ, reward);
  out.achieved_objective = expected_return(occ, anti_reward);
  out.iterations = mm.iterations;
  out.converged = mm.converged;
  out.q_table = std::move(sol.q);
  out.policy = std::move(policy);
  return out;
}

MmMixResult mm_mix(const TabularMdp& mdp, const RewardTable& reward, const AntiRewardGenerator& generator,
                   const RewardConstraint& constraint, const MmMixOptions& options) {
  require(options.n_mix >= 1, ErrorCode::kInvalidArgument, "n_mix must be >= 1");
  std::vector<std::uint64_t> seeds = options.seeds;
  if (seeds.empty()) {
    for (int i = 0; i < options.n_mix; ++i) seeds.push_back(static_cast<std::uint64_t>(i + 1));
  }
  require(static_cast<int>(seeds.size()) == options.n_mix, ErrorCode::kInvalidArgument,
          "seed list length must equal n_mix");
  const Vector weights = options.weights.value_or(Vector::Constant(options.n_mix, 1.0 / options.n_mix));
  require(weights.size() == options.n_mix, ErrorCode::kDimensionMismatch, "weights length must equal n_mix");

  MmMixResult out;
  double lower = -std::numeric_limits<double>::infinity();
  double e_star = 0.0;
  for (std::uint64_t seed : seeds) {
    out.anti_rewards.push_back(generator(seed));
    const ReferenceReturns ref = reference_returns(mdp, reward, &out.anti_rewards.back());
    lower = std::max(lower, std::min(*ref.e_minus, ref.e_star));
    e_star = ref.e_star;
  }
  const double e_min = constraint.resolve(lower, e_star);

  std::vector<StochasticPolicy> flat;
  std::vector<double> flat_weights;
  double lambda = 0.0;
  double objective = 0.0;
  for (int i = 0; i < options.n_mix; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    PlannerResult member = mm_binary_search(mdp, reward, out.anti_rewards[ui], RewardConstraint::absolute(e_min),
                                            options.member);
    const double w = weights(i);
    lambda += w * member.lambda_star;
    objective += w * member.achieved_objective;
    if (const auto* single = std::get_if<StochasticPolicy>(&member.policy)) {
      flat.push_back(*single);
      flat_weights.push_back(w);
    } else {
      const auto& mixed = std::get<MixedPolicy>(member.policy);
      for (std::size_t k = 0; k < mixed.members().size(); ++k) {
        flat.push_back(mixed.members()[k]);
        flat_weights.push_back(w * mixed.weights()(static_cast<Eigen::Index>(k)));
      }
    }
    out.members.push_back(std::move(member));
  }

  Vector fw = Eigen::Map<const Vector>(flat_weights.data(), static_cast<Eigen::Index>(flat_weights.size()));
  fw /= fw.sum();
  MixResult mix = mix_policies(std::move(flat), fw, mdp);

  double member_return = 0.0;
  for (int i = 0; i < options.n_mix; ++i) member_return += weights(i) * out.members[static_cast<std::size_t>(i)].achieved_return;

  PlannerResult& res = out.result;
  res.e_min = e_min;
  res.lambda_star = lambda;
  res.achieved_return = member_return;
  res.achieved_objective = objective;
  res.iterations = 0;
  res.converged = true;
  for (const auto& m : out.members) {
    res.iterations += m.iterations;
    res.converged = res.converged && m.converged;
  }
  res.policy = std::move(mix.policy);
  return out;
}

}  // namespace decoy

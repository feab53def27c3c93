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
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "decoy/mdp.hpp"

namespace decoy {

/// Return floor, either absolute (normalized return units) or as a fraction of
/// the planner-specific feasible range [lower, E*].
struct RewardConstraint {
  enum class Kind { kAbsolute, kFraction };
  Kind kind = Kind::kFraction;
  double value = 0.5;

  static RewardConstraint absolute(double e_min) { return {Kind::kAbsolute, e_min}; }
  static RewardConstraint fraction(double frac) { return {Kind::kFraction, frac}; }

  /// Maps onto [lower, upper]; throws InfeasibleThreshold outside the range.
  double resolve(double lower, double upper) const;
};

struct ReferenceReturns {
  double e_hat = 0.0;   // uniform policy
  double e_star = 0.0;  // optimal policy of r
  std::optional<double> e_minus;  // optimal policy of r_minus, evaluated under r
};

ReferenceReturns reference_returns(const TabularMdp& mdp, const RewardTable& reward,
                                   const RewardTable* anti_reward = nullptr);

struct PlannerResult {
  AnyPolicy policy;
  double e_min = 0.0;
  double lambda_star = 0.0;
  double achieved_return = 0.0;
  // Causal entropy for MEIR, anti-return for the MM family.
  double achieved_objective = 0.0;
  int iterations = 0;
  bool converged = false;
  std::optional<Matrix> q_table;

  double constraint_deviation() const { return achieved_return - e_min; }
};

struct MeirOptions {
  double return_tol = 1e-6;
  // Upper end of the lambda search; 0 picks 1e6 / (E* - E_hat).
  double lambda_cap = 0.0;
  double soft_tol = 1e-11;
};

/// Entropy-maximizing policy subject to a return floor. The policy is always
/// the soft-optimal policy of lambda * r for the reported lambda.
PlannerResult meir(const TabularMdp& mdp, const RewardTable& reward, const RewardConstraint& constraint,
                   const MeirOptions& options = {});

enum class MmMode { kFeasible, kExact };

struct MmOptions {
  // 0 picks 1e6 * (max|r_minus| + 1) / (reward gap).
  double lambda_max = 0.0;
  double eps = 1e-9;  // relative bracket width
  MmMode mode = MmMode::kExact;
};

/// Bisection on the dual variable of the anti-return program. In exact mode
/// the two bracket policies are mixed so the floor holds with equality.
PlannerResult mm_binary_search(const TabularMdp& mdp, const RewardTable& reward, const RewardTable& anti_reward,
                               const RewardConstraint& constraint, const MmOptions& options = {});

struct PrimalDualOptions {
  double alpha = 1.0;
  int iterations = 2000;
  double lambda0 = 0.0;
  // Converged when max - min of lambda over the trailing window is below this.
  double oscillation_tol = 1e-2;
  int window = 50;
};

/// Projected dual descent. The reported policy is the uniform trajectory
/// mixture of the primal iterates from the second half of the run.
PlannerResult mm_primal_dual(const TabularMdp& mdp, const RewardTable& reward, const RewardTable& anti_reward,
                             const RewardConstraint& constraint, const PrimalDualOptions& options = {});

/// Boltzmann randomization over the optimal Q of lambda* r + r_minus. The
/// floor is not guaranteed; inspect constraint_deviation().
PlannerResult mmbe(const TabularMdp& mdp, const RewardTable& reward, const RewardTable& anti_reward,
                   const RewardConstraint& constraint, double beta, const MmOptions& options = {});

using AntiRewardGenerator = std::function<RewardTable(std::uint64_t seed)>;

struct MmMixOptions {
  int n_mix = 3;
  std::vector<std::uint64_t> seeds;  // defaults to 1..n_mix
  std::optional<Vector> weights;     // defaults to uniform
  MmOptions member{0.0, 1e-9, MmMode::kFeasible};
};

struct MmMixResult {
  PlannerResult result;
  std::vector<RewardTable> anti_rewards;
  std::vector<PlannerResult> members;
};

/// One MM policy per seeded anti-reward at a common floor. A fractional
/// constraint is resolved against [max_i E-_i, E*] so it is feasible for every
/// member.
MmMixResult mm_mix(const TabularMdp& mdp, const RewardTable& reward, const AntiRewardGenerator& generator,
                   const RewardConstraint& constraint, const MmMixOptions& options = {});

}  // namespace decoy

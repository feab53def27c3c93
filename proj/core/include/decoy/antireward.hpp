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

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "decoy/mdp.hpp"

namespace decoy {

enum class DivergenceKind {
  kForwardKL,
  kBackwardKL,
  kJensenShannon,
  kPearsonChi2,
  kSquaredHellinger,
  kTotalVariation,
  kWasserstein1,
};

inline constexpr std::array<DivergenceKind, 7> kAllDivergences{
    DivergenceKind::kForwardKL,     DivergenceKind::kBackwardKL,       DivergenceKind::kJensenShannon,
    DivergenceKind::kPearsonChi2,   DivergenceKind::kSquaredHellinger, DivergenceKind::kTotalVariation,
    DivergenceKind::kWasserstein1};

/// Anti-reward -log pi*(a|s) against the soft-optimal policy.
struct TrajectoryKL {};

using AntiRewardKind = std::variant<DivergenceKind, TrajectoryKL>;

std::string to_string(DivergenceKind kind);
std::string to_string(const AntiRewardKind& kind);
/// Accepts the names produced by to_string plus "trajectory_kl".
AntiRewardKind parse_anti_reward_kind(const std::string& name);

enum class OccupancyInit {
  kUniform,  // occupancy of the uniform policy
  kRandom,   // occupancy of a seeded flat-Dirichlet policy
};

struct AntiRewardConfig {
  AntiRewardKind kind = TrajectoryKL{};
  int iterations = 5;
  double smoothing_eps = 1e-8;
  std::optional<std::pair<double, double>> clip;
  double merl_temperature = 1.0;
  OccupancyInit init = OccupancyInit::kUniform;
  int critic_iterations = 500;
  std::uint64_t seed = 0;
};

void validate(const AntiRewardConfig& config);

/// Pointwise closed-form maximizer of phi(u) * rho_minus - u * rho_star after
/// flooring both measures at `floor`.
double closed_form_entry(DivergenceKind kind, double rho_star, double rho_minus, double floor);

RewardTable f_div_closed_form(const OccupancyMeasure& rho_star, const OccupancyMeasure& rho_minus,
                              DivergenceKind kind, double smoothing_eps = 1e-8);

/// Undirected hop distance between states over the union of action supports.
Matrix hop_distance(const TabularMdp& mdp);

struct CriticResult {
  RewardTable reward;
  double objective = 0.0;           // E_{rho_minus}[f] - E_{rho_star}[f]
  double lipschitz_violation = 0.0; // max_{x,y} |f(x) - f(y)| - d(x,y), floored at 0
};

/// Tabular Wasserstein-1 critic. `ground_metric` is a symmetric state
/// distance; all actions of a state share one value (distance zero).
CriticResult wasserstein1_critic(const OccupancyMeasure& rho_star, const OccupancyMeasure& rho_minus,
                                 const Matrix& ground_metric, int iterations = 500);

/// -log pi(a|s) for a policy with full support.
RewardTable neg_log_policy(const StochasticPolicy& policy);

RewardTable traj_kl_anti_reward(const TabularMdp& mdp, const RewardTable& reward, double merl_temperature);

struct AntiRewardDiagnostics {
  // overlap[0] is at initialization, overlap[k] after the k-th update.
  std::vector<double> overlap;
  std::optional<double> critic_violation;
};

struct AntiReward {
  RewardTable reward;
  AntiRewardDiagnostics diagnostics;
};

/// Alternates the divergence maximizer with re-planning on the anti-reward.
AntiReward gen_anti_reward(const TabularMdp& mdp, const RewardTable& reward, const AntiRewardConfig& config);

/// sum_x min(a(x), b(x)).
double occupancy_overlap(const OccupancyMeasure& a, const OccupancyMeasure& b);

}  // namespace decoy

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
#include <span>
#include <vector>

#include "decoy/mdp.hpp"

namespace decoy {

struct IrlConfig {
  enum class Init { kZero, kSeededUniform };
  // kState ties r(s, a) across actions: r(s, a) = theta(s).
  enum class Features { kStateAction, kState };
  double learning_rate = 0.1;
  double lr_decay = 0.999;  // geometric, per iteration
  int max_iters = 5000;
  double grad_tol = 1e-3;   // L1 occupancy gap
  Init init = Init::kZero;
  Features features = Features::kStateAction;
  std::uint64_t seed = 0;
};

void validate(const IrlConfig& config);

struct RecoveredReward {
  RewardTable reward;
  double final_occupancy_gap = 0.0;  // L1 over (s, a)
  int iterations_used = 0;
  bool converged = false;
};

/// MCE-IRL surrogate: E_target[r] - (1 - gamma) mu . V_soft(r). Its gradient
/// is target - rho_soft(r).
double mce_log_likelihood(const TabularMdp& dynamics, const OccupancyMeasure& target, const RewardTable& reward);

/// Tabular maximum causal entropy IRL with Adam ascent on the surrogate above.
/// The observer uses the dynamics only; `dynamics.reward()` is never read.
/// Stops once the L1 norm of the gradient in feature space is <= grad_tol;
/// for kStateAction that is the occupancy gap itself.
RecoveredReward mce_irl(const TabularMdp& dynamics, const OccupancyMeasure& target, const IrlConfig& config = {});

RecoveredReward irl_from_demos(const TabularMdp& dynamics, std::span<const Trajectory> trajectories, double gamma,
                               const IrlConfig& config = {});

struct OccupancyClusters {
  std::vector<std::vector<int>> clusters;  // states, ascending; clusters ordered by first state
  std::vector<double> masses;
};

/// Keeps states with visitation above mass_threshold * max visitation and
/// splits them into connected components of the transition graph.
OccupancyClusters cluster_occupancy(const TabularMdp& mdp, const OccupancyMeasure& rho, double mass_threshold = 0.05);

enum class ClusterMode { kMax, kRandom };

struct ClusteredRecovery {
  RecoveredReward recovered;
  int chosen_cluster = -1;
  OccupancyMeasure restricted_target;
};

ClusteredRecovery irl_clustered(const TabularMdp& mdp, const OccupancyMeasure& rho, const IrlConfig& config,
                                ClusterMode mode, std::uint64_t seed, double mass_threshold = 0.05);

}  // namespace decoy

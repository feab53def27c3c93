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

#include "decoy/mdp.hpp"

namespace decoy {

/// Unweighted sample correlation over all (s, a) entries.
double pearson(const RewardTable& r1, const RewardTable& r2);

/// Canonicalization distributions. Empty vectors mean uniform.
struct EpicDistributions {
  Vector states;
  Vector actions;
};

/// Canonicalizes a transition reward R(s, a, s') stored as an (S*A) x S
/// matrix with row s*A + a.
Matrix canonicalize(const Matrix& r3, int n_states, int n_actions, double gamma, const EpicDistributions& dist = {});

/// Lifts r(s, a) to r(s, a, s') constant in s'.
Matrix lift_reward(const RewardTable& r);

/// EPIC distance, exact over the full (s, a, s') product.
double epic(const RewardTable& r1, const RewardTable& r2, double gamma, const EpicDistributions& dist = {});
double epic(const Matrix& r1, const Matrix& r2, int n_states, int n_actions, double gamma,
            const EpicDistributions& dist = {});

struct RolloutResult {
  double rollout_return = 0.0;
  double rollout_ratio = 0.0;  // rollout_return / E*
};

/// Return under r_true of the (hard) optimal policy of r_tilde.
RolloutResult rollout_eval(const TabularMdp& mdp, const RewardTable& r_true, const RewardTable& r_tilde);

/// Fraction of random policy pairs whose return ordering agrees; return gaps
/// within 1e-9 count as agreement.
double ordering_consistency(const TabularMdp& mdp, const RewardTable& r_true, const RewardTable& r_tilde,
                            int n_pairs, std::uint64_t seed);

struct MetricsRequest {
  bool pearson = true;
  bool epic = true;
  bool rollout = true;
  bool ordering = true;
  int ordering_pairs = 2000;
  std::uint64_t seed = 0;
};

/// Fields not requested stay empty.
struct MetricsReport {
  std::optional<double> pearson;
  std::optional<double> epic;
  std::optional<double> rollout_return;
  std::optional<double> rollout_ratio;
  std::optional<double> ordering_consistency;
};

MetricsReport evaluate_reward(const TabularMdp& mdp, const RewardTable& r_true, const RewardTable& r_tilde,
                              const MetricsRequest& request = {});

}  // namespace decoy

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
#include <random>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "decoy/error.hpp"

namespace decoy {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Tolerance used for every "sums to one" check on probability objects.
inline constexpr double kProbabilityTolerance = 1e-9;

/// A reward over state-action pairs. True rewards, anti-rewards and recovered
/// rewards all share this shape.
class RewardTable {
 public:
  RewardTable() = default;
  explicit RewardTable(Matrix values);

  static RewardTable zeros(int n_states, int n_actions);
  /// Broadcasts a per-state reward across all actions.
  static RewardTable from_state_rewards(const Vector& state_rewards, int n_actions);

  int n_states() const { return static_cast<int>(values_.rows()); }
  int n_actions() const { return static_cast<int>(values_.cols()); }
  const Matrix& values() const { return values_; }
  double operator()(int s, int a) const { return values_(s, a); }

  RewardTable scaled(double factor) const;
  friend RewardTable operator+(const RewardTable& lhs, const RewardTable& rhs);

 private:
  Matrix values_;
};

/// Per-state action distributions. Rows are validated on construction.
class StochasticPolicy {
 public:
  StochasticPolicy() = default;
  explicit StochasticPolicy(Matrix probs);

  static StochasticPolicy uniform(int n_states, int n_actions);
  static StochasticPolicy deterministic(std::span<const int> actions, int n_actions);

  int n_states() const { return static_cast<int>(probs_.rows()); }
  int n_actions() const { return static_cast<int>(probs_.cols()); }
  const Matrix& probs() const { return probs_; }
  double operator()(int s, int a) const { return probs_(s, a); }

  /// Lowest-index action of maximal probability in state s.
  int argmax(int s) const;
  bool is_deterministic() const;

 private:
  Matrix probs_;
};

/// Trajectory-level mixture: one member is drawn per episode from `weights`.
class MixedPolicy {
 public:
  MixedPolicy(std::vector<StochasticPolicy> members, Vector weights);

  const std::vector<StochasticPolicy>& members() const { return members_; }
  const Vector& weights() const { return weights_; }
  int n_states() const { return members_.front().n_states(); }
  int n_actions() const { return members_.front().n_actions(); }

 private:
  std::vector<StochasticPolicy> members_;
  Vector weights_;
};

using AnyPolicy = std::variant<StochasticPolicy, MixedPolicy>;

/// Normalized discounted state-action visitation. Total mass is one; the
/// (1 - gamma) factor is folded in so that sum(rho * r) is the normalized
/// return (1 - gamma) * E[sum_t gamma^t r_t].
class OccupancyMeasure {
 public:
  OccupancyMeasure() = default;
  explicit OccupancyMeasure(Matrix rho);

  int n_states() const { return static_cast<int>(rho_.rows()); }
  int n_actions() const { return static_cast<int>(rho_.cols()); }
  const Matrix& rho() const { return rho_; }
  double operator()(int s, int a) const { return rho_(s, a); }
  Vector state_visitation() const { return rho_.rowwise().sum(); }
  double mass() const { return rho_.sum(); }

 private:
  Matrix rho_;
};

/// Finite MDP with dense dynamics. Transitions are stored as an
/// (n_states * n_actions) x n_states matrix; row s * n_actions + a holds
/// P(. | s, a). The constructor only checks shapes; use validate_mdp for the
/// semantic invariants.
class TabularMdp {
 public:
  TabularMdp(int n_states, int n_actions, Matrix transition, RewardTable reward,
             double gamma, Vector initial_dist);

  int n_states() const { return n_states_; }
  int n_actions() const { return n_actions_; }
  double gamma() const { return gamma_; }
  const Matrix& transition() const { return transition_; }
  const RewardTable& reward() const { return reward_; }
  const Vector& initial_dist() const { return initial_dist_; }

  int row_index(int s, int a) const { return s * n_actions_ + a; }
  double p(int s, int a, int next) const { return transition_(row_index(s, a), next); }
  auto next_state_row(int s, int a) const { return transition_.row(row_index(s, a)); }

  /// Same dynamics with a different reward. Observers use this to drop the
  /// true reward before running inference.
  TabularMdp with_reward(RewardTable reward) const;

 private:
  int n_states_;
  int n_actions_;
  Matrix transition_;
  RewardTable reward_;
  double gamma_;
  Vector initial_dist_;
};

struct Violation {
  enum class Kind {
    kNegativeProbability,
    kNonStochasticRow,
    kBadInitialDist,
    kUnreachableState,
    kNonFiniteReward,
    kBadDiscount,
  };
  Kind kind;
  int state = -1;
  int action = -1;
  std::string detail;
};

std::string_view to_string(Violation::Kind kind);

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
};

ValidationReport validate_mdp(const TabularMdp& mdp);

/// P_pi(s, s') = sum_a pi(a|s) P(s'|s,a).
Matrix policy_transition(const TabularMdp& mdp, const StochasticPolicy& policy);

OccupancyMeasure occupancy_of_policy(const TabularMdp& mdp, const StochasticPolicy& policy);
OccupancyMeasure occupancy_of_policy(const TabularMdp& mdp, const AnyPolicy& policy);

/// Row-wise normalization; zero-mass states fall back to uniform.
StochasticPolicy policy_of_occupancy(const OccupancyMeasure& rho);

double expected_return(const OccupancyMeasure& rho, const RewardTable& reward);

/// -sum rho(s,a) log pi(a|s) with 0 log 0 = 0.
double causal_entropy(const OccupancyMeasure& rho);

/// Largest absolute Bellman-flow residual over states (normalized form).
double flow_residual(const TabularMdp& mdp, const OccupancyMeasure& rho);

struct OptimalSolution {
  StochasticPolicy policy;
  Matrix q;
  Vector v;
  int iterations = 0;
};

/// Value iteration to sup-norm residual <= tol followed by exact policy
/// evaluation sweeps until the greedy policy is stable. Ties go to the
/// lowest action index.
OptimalSolution solve_optimal(const TabularMdp& mdp, const RewardTable& reward, double tol = 1e-10);

struct SoftSolution {
  StochasticPolicy policy;
  Matrix q;
  Vector v;
  int iterations = 0;
};

/// Soft value iteration: Q = r + gamma P V, V = logsumexp_a Q. `warm_start`
/// seeds V and is only a speed hint.
SoftSolution soft_value_iteration(const TabularMdp& mdp, const RewardTable& reward, double tol,
                                  const Vector* warm_start = nullptr);

/// Rows drawn from a flat Dirichlet.
StochasticPolicy random_policy(int n_states, int n_actions, std::mt19937_64& rng);

StochasticPolicy solve_soft(const TabularMdp& mdp, const RewardTable& reward, double tol = 1e-10);

/// Boltzmann policy pi(a|s) proportional to exp(q(s,a) / temperature).
StochasticPolicy boltzmann_policy(const Matrix& q, double temperature);

struct Step {
  int state;
  int action;
  double reward;
};

struct Trajectory {
  std::vector<Step> steps;
  int horizon = 0;
};

/// Smallest horizon h with gamma^h below `floor`.
int truncation_horizon(double gamma, double floor = 1e-6);

std::vector<Trajectory> sample_trajectories(const TabularMdp& mdp, const AnyPolicy& policy, int n,
                                            int horizon, std::uint64_t seed);

/// Discount-weighted visit counts renormalized to unit mass. Flow is not
/// asserted: finite horizons leave a truncation bias.
OccupancyMeasure empirical_occupancy(std::span<const Trajectory> trajectories, double gamma, int n_states,
                                     int n_actions);

struct MixResult {
  MixedPolicy policy;
  OccupancyMeasure occupancy;
};

MixResult mix_policies(std::vector<StochasticPolicy> members, const Vector& weights,
                       const TabularMdp& mdp);

}  // namespace decoy

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

#include "decoy/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <random>
#include <sstream>

namespace decoy {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kEmptyDemonstrations: return "EmptyDemonstrations";
    case ErrorCode::kInfeasibleThreshold: return "InfeasibleThreshold";
    case ErrorCode::kLambdaCapTooSmall: return "LambdaCapTooSmall";
    case ErrorCode::kDegenerateSupport: return "DegenerateSupport";
    case ErrorCode::kDegenerateVariance: return "DegenerateVariance";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kValidationError: return "ValidationError";
    case ErrorCode::kIo: return "IoError";
  }
  return "Unknown";
}

namespace {

std::string dims(const Matrix& m) {
  std::ostringstream os;
  os << m.rows() << "x" << m.cols();
  return os.str();
}

void check_rows_stochastic(const Matrix& m, const char* what) {
  for (Eigen::Index s = 0; s < m.rows(); ++s) {
    const double sum = m.row(s).sum();
    require(std::abs(sum - 1.0) <= kProbabilityTolerance && m.row(s).minCoeff() >= 0.0,
            ErrorCode::kInvalidArgument,
            std::string(what) + " row " + std::to_string(s) + " is not a distribution");
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// RewardTable

RewardTable::RewardTable(Matrix values) : values_(std::move(values)) {
  require(values_.size() > 0, ErrorCode::kInvalidArgument, "empty reward table");
  require(values_.allFinite(), ErrorCode::kInvalidArgument, "reward table has non-finite entries");
}

RewardTable RewardTable::zeros(int n_states, int n_actions) {
  return RewardTable(Matrix::Zero(n_states, n_actions));
}

RewardTable RewardTable::from_state_rewards(const Vector& state_rewards, int n_actions) {
  return RewardTable(state_rewards.replicate(1, n_actions));
}

RewardTable RewardTable::scaled(double factor) const { return RewardTable(values_ * factor); }

RewardTable operator+(const RewardTable& lhs, const RewardTable& rhs) {
  require(lhs.values_.rows() == rhs.values_.rows() && lhs.values_.cols() == rhs.values_.cols(),
          ErrorCode::kDimensionMismatch, "reward tables " + dims(lhs.values_) + " and " + dims(rhs.values_));
  return RewardTable(lhs.values_ + rhs.values_);
}

// ---------------------------------------------------------------------------
// Policies

StochasticPolicy::StochasticPolicy(Matrix probs) : probs_(std::move(probs)) {
  require(probs_.size() > 0, ErrorCode::kInvalidArgument, "empty policy");
  require(probs_.allFinite(), ErrorCode::kInvalidArgument, "policy has non-finite entries");
  check_rows_stochastic(probs_, "policy");
}

StochasticPolicy StochasticPolicy::uniform(int n_states, int n_actions) {
  return StochasticPolicy(Matrix::Constant(n_states, n_actions, 1.0 / n_actions));
}

StochasticPolicy StochasticPolicy::deterministic(std::span<const int> actions, int n_actions) {
  Matrix probs = Matrix::Zero(static_cast<Eigen::Index>(actions.size()), n_actions);
  for (std::size_t s = 0; s < actions.size(); ++s) {
    require(actions[s] >= 0 && actions[s] < n_actions, ErrorCode::kInvalidArgument,
            "action index out of range");
    probs(static_cast<Eigen::Index>(s), actions[s]) = 1.0;
  }
  return StochasticPolicy(std::move(probs));
}

int StochasticPolicy::argmax(int s) const {
  Eigen::Index best = 0;
  probs_.row(s).maxCoeff(&best);
  return static_cast<int>(best);
}

bool StochasticPolicy::is_deterministic() const {
  return ((probs_.array() == 1.0).rowwise().any()).all();
}

MixedPolicy::MixedPolicy(std::vector<StochasticPolicy> members, Vector weights)
    : members_(std::move(members)), weights_(std::move(weights)) {
  require(!members_.empty(), ErrorCode::kInvalidArgument, "mixed policy needs at least one member");
  require(static_cast<std::size_t>(weights_.size()) == members_.size(), ErrorCode::kDimensionMismatch,
          "mixture weights do not match member count");
  require(weights_.minCoeff() >= 0.0 && std::abs(weights_.sum() - 1.0) <= kProbabilityTolerance,
          ErrorCode::kInvalidArgument, "mixture weights are not a distribution");
  for (const auto& m : members_) {
    require(m.n_states() == members_.front().n_states() && m.n_actions() == members_.front().n_actions(),
            ErrorCode::kDimensionMismatch, "mixture members have different shapes");
  }
}

OccupancyMeasure::OccupancyMeasure(Matrix rho) : rho_(std::move(rho)) {
  require(rho_.size() > 0, ErrorCode::kInvalidArgument, "empty occupancy measure");
  require(rho_.allFinite() && rho_.minCoeff() >= 0.0, ErrorCode::kInvalidArgument,
          "occupancy measure must be finite and non-negative");
  require(std::abs(rho_.sum() - 1.0) <= kProbabilityTolerance, ErrorCode::kInvalidArgument,
          "occupancy measure must have unit mass");
}

// ---------------------------------------------------------------------------
// TabularMdp

TabularMdp::TabularMdp(int n_states, int n_actions, Matrix transition, RewardTable reward, double gamma,
                       Vector initial_dist)
    : n_states_(n_states),
      n_actions_(n_actions),
      transition_(std::move(transition)),
      reward_(std::move(reward)),
      gamma_(gamma),
      initial_dist_(std::move(initial_dist)) {
  require(n_states > 0 && n_actions > 0, ErrorCode::kInvalidArgument, "MDP needs states and actions");
  require(transition_.rows() == static_cast<Eigen::Index>(n_states) * n_actions && transition_.cols() == n_states,
          ErrorCode::kDimensionMismatch, "transition tensor has shape " + dims(transition_));
  require(reward_.n_states() == n_states && reward_.n_actions() == n_actions, ErrorCode::kDimensionMismatch,
          "reward table has shape " + dims(reward_.values()));
  require(initial_dist_.size() == n_states, ErrorCode::kDimensionMismatch, "initial distribution length");
}

TabularMdp TabularMdp::with_reward(RewardTable reward) const {
  return TabularMdp(n_states_, n_actions_, transition_, std::move(reward), gamma_, initial_dist_);
}

std::string_view to_string(Violation::Kind kind) {
  switch (kind) {
    case Violation::Kind::kNegativeProbability: return "NegativeProbability";
    case Violation::Kind::kNonStochasticRow: return "NonStochasticRow";
    case Violation::Kind::kBadInitialDist: return "BadInitialDist";
    case Violation::Kind::kUnreachableState: return "UnreachableState";
    case Violation::Kind::kNonFiniteReward: return "NonFiniteReward";
    case Violation::Kind::kBadDiscount: return "BadDiscount";
  }
  return "Unknown";
}

ValidationReport validate_mdp(const TabularMdp& mdp) {
  ValidationReport report;
  const int n = mdp.n_states();
  const int m = mdp.n_actions();
  if (!(mdp.gamma() > 0.0 && mdp.gamma() < 1.0)) {
    report.violations.push_back({Violation::Kind::kBadDiscount, -1, -1, "gamma must lie in (0,1)"});
  }
  for (int s = 0; s < n; ++s) {
    for (int a = 0; a < m; ++a) {
      const auto row = mdp.next_state_row(s, a);
      if (row.minCoeff() < 0.0) {
        report.violations.push_back({Violation::Kind::kNegativeProbability, s, a, "negative transition entry"});
      }
      const double sum = row.sum();
      if (std::abs(sum - 1.0) > kProbabilityTolerance) {
        report.violations.push_back(
            {Violation::Kind::kNonStochasticRow, s, a, "row sums to " + std::to_string(sum)});
      }
    }
  }
  const auto& mu = mdp.initial_dist();
  if (mu.minCoeff() < 0.0 || std::abs(mu.sum() - 1.0) > kProbabilityTolerance) {
    report.violations.push_back({Violation::Kind::kBadInitialDist, -1, -1, "initial distribution invalid"});
  }
  if (!mdp.reward().values().allFinite()) {
    report.violations.push_back({Violation::Kind::kNonFiniteReward, -1, -1, "reward has non-finite entries"});
  }

  // Reachability over the union of action supports, seeded by the support of mu.
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  std::deque<int> frontier;
  for (int s = 0; s < n; ++s) {
    if (mu(s) > 0.0) {
      seen[static_cast<std::size_t>(s)] = 1;
      frontier.push_back(s);
    }
  }
  while (!frontier.empty()) {
    const int s = frontier.front();
    frontier.pop_front();
    for (int a = 0; a < m; ++a) {
      for (int t = 0; t < n; ++t) {
        if (!seen[static_cast<std::size_t>(t)] && mdp.p(s, a, t) > 0.0) {
          seen[static_cast<std::size_t>(t)] = 1;
          frontier.push_back(t);
        }
      }
    }
  }
  for (int s = 0; s < n; ++s) {
    if (!seen[static_cast<std::size_t>(s)]) {
      report.violations.push_back({Violation::Kind::kUnreachableState, s, -1, "no path from the initial support"});
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Occupancy algebra

namespace {

void check_policy_shape(const TabularMdp& mdp, int n_states, int n_actions) {
  require(n_states == mdp.n_states() && n_actions == mdp.n_actions(), ErrorCode::kDimensionMismatch,
          "policy shape does not match the MDP");
}

}  // namespace

Matrix policy_transition(const TabularMdp& mdp, const StochasticPolicy& policy) {
  check_policy_shape(mdp, policy.n_states(), policy.n_actions());
  const int n = mdp.n_states();
  Matrix p_pi = Matrix::Zero(n, n);
  for (int s = 0; s < n; ++s) {
    for (int a = 0; a < mdp.n_actions(); ++a) {
      const double w = policy(s, a);
      if (w != 0.0) p_pi.row(s) += w * mdp.next_state_row(s, a);
    }
  }
  return p_pi;
}

OccupancyMeasure occupancy_of_policy(const TabularMdp& mdp, const StochasticPolicy& policy) {
  const int n = mdp.n_states();
  const Matrix p_pi = policy_transition(mdp, policy);
  const Matrix system = Matrix::Identity(n, n) - mdp.gamma() * p_pi.transpose();
  const Vector rhs = (1.0 - mdp.gamma()) * mdp.initial_dist();
  Vector d = system.partialPivLu().solve(rhs);
  d = d.cwiseMax(0.0);
  d /= d.sum();
  Matrix rho = policy.probs().array().colwise() * d.array();
  return OccupancyMeasure(std::move(rho));
}

OccupancyMeasure occupancy_of_policy(const TabularMdp& mdp, const AnyPolicy& policy) {
  if (const auto* single = std::get_if<StochasticPolicy>(&policy)) return occupancy_of_policy(mdp, *single);
  const auto& mixed = std::get<MixedPolicy>(policy);
  Matrix rho = Matrix::Zero(mdp.n_states(), mdp.n_actions());
  for (std::size_t i = 0; i < mixed.members().size(); ++i) {
    rho += mixed.weights()(static_cast<Eigen::Index>(i)) * occupancy_of_policy(mdp, mixed.members()[i]).rho();
  }
  return OccupancyMeasure(rho / rho.sum());
}

StochasticPolicy policy_of_occupancy(const OccupancyMeasure& rho) {
  Matrix probs = rho.rho();
  const int n_actions = rho.n_actions();
  for (Eigen::Index s = 0; s < probs.rows(); ++s) {
    const double mass = probs.row(s).sum();
    if (mass > 0.0) {
      probs.row(s) /= mass;
    } else {
      probs.row(s).setConstant(1.0 / n_actions);
    }
  }
  return StochasticPolicy(std::move(probs));
}

double expected_return(const OccupancyMeasure& rho, const RewardTable& reward) {
  require(rho.n_states() == reward.n_states() && rho.n_actions() == reward.n_actions(),
          ErrorCode::kDimensionMismatch, "occupancy and reward shapes differ");
  return (rho.rho().array() * reward.values().array()).sum();
}

double causal_entropy(const OccupancyMeasure& rho) {
  const Vector d = rho.state_visitation();
  double h = 0.0;
  for (int s = 0; s < rho.n_states(); ++s) {
    if (d(s) <= 0.0) continue;
    for (int a = 0; a < rho.n_actions(); ++a) {
      const double x = rho(s, a);
      if (x > 0.0) h -= x * std::log(x / d(s));
    }
  }
  return std::max(h, 0.0);
}

double flow_residual(const TabularMdp& mdp, const OccupancyMeasure& rho) {
  const int n = mdp.n_states();
  const int m = mdp.n_actions();
  Vector inflow = (1.0 - mdp.gamma()) * mdp.initial_dist();
  for (int s = 0; s < n; ++s) {
    for (int a = 0; a < m; ++a) {
      const double x = rho(s, a);
      if (x != 0.0) inflow += mdp.gamma() * x * mdp.next_state_row(s, a).transpose();
    }
  }
  return (rho.state_visitation() - inflow).cwiseAbs().maxCoeff();
}

// ---------------------------------------------------------------------------
// Planning

namespace {

// q(s,a) = r(s,a) + gamma * sum_s' P(s'|s,a) v(s')
Matrix backup(const TabularMdp& mdp, const Matrix& reward, const Vector& v) {
  const Vector pv = mdp.transition() * v;
  Matrix q = reward;
  const int m = mdp.n_actions();
  for (int s = 0; s < mdp.n_states(); ++s) {
    for (int a = 0; a < m; ++a) q(s, a) += mdp.gamma() * pv(s * m + a);
  }
  return q;
}

std::vector<int> greedy_actions(const Matrix& q) {
  const double scale = 1.0 + q.cwiseAbs().maxCoeff();
  const double tie = 1e-12 * scale;
  std::vector<int> actions(static_cast<std::size_t>(q.rows()));
  for (Eigen::Index s = 0; s < q.rows(); ++s) {
    const double best = q.row(s).maxCoeff();
    int chosen = 0;
    while (q(s, chosen) < best - tie) ++chosen;
    actions[static_cast<std::size_t>(s)] = chosen;
  }
  return actions;
}

Vector evaluate_deterministic(const TabularMdp& mdp, const Matrix& reward, const std::vector<int>& actions) {
  const int n = mdp.n_states();
  Matrix system = Matrix::Identity(n, n);
  Vector r(n);
  for (int s = 0; s < n; ++s) {
    const int a = actions[static_cast<std::size_t>(s)];
    system.row(s) -= mdp.gamma() * mdp.next_state_row(s, a);
    r(s) = reward(s, a);
  }
  return system.partialPivLu().solve(r);
}

void check_reward_shape(const TabularMdp& mdp, const RewardTable& reward) {
  require(reward.n_states() == mdp.n_states() && reward.n_actions() == mdp.n_actions(),
          ErrorCode::kDimensionMismatch, "reward shape does not match the MDP");
}

}  // namespace

OptimalSolution solve_optimal(const TabularMdp& mdp, const RewardTable& reward, double tol) {
  require(tol > 0.0, ErrorCode::kInvalidArgument, "tolerance must be positive");
  check_reward_shape(mdp, reward);
  const Matrix& r = reward.values();
  Vector v = Vector::Zero(mdp.n_states());
  Matrix q;
  int iterations = 0;
  // Value iteration is only used to get close; policy evaluation below makes
  // the returned Q exact for the returned policy.
  const double stop = std::max(tol, 1e-13 * (1.0 + r.cwiseAbs().maxCoeff()));
  for (; iterations < 100000; ++iterations) {
    q = backup(mdp, r, v);
    const Vector next = q.rowwise().maxCoeff();
    const double residual = (next - v).cwiseAbs().maxCoeff();
    v = next;
    if (residual <= stop) break;
  }
  std::vector<int> actions = greedy_actions(backup(mdp, r, v));
  for (int round = 0; round < 100; ++round) {
    v = evaluate_deterministic(mdp, r, actions);
    q = backup(mdp, r, v);
    std::vector<int> improved = greedy_actions(q);
    ++iterations;
    if (improved == actions) break;
    actions = std::move(improved);
  }
  return {StochasticPolicy::deterministic(actions, mdp.n_actions()), std::move(q), std::move(v), iterations};
}

namespace {

Vector logsumexp_rows(const Matrix& q) {
  Vector out(q.rows());
  for (Eigen::Index s = 0; s < q.rows(); ++s) {
    const double peak = q.row(s).maxCoeff();
    out(s) = peak + std::log((q.row(s).array() - peak).exp().sum());
  }
  return out;
}

}  // namespace

StochasticPolicy boltzmann_policy(const Matrix& q, double temperature) {
  require(temperature > 0.0, ErrorCode::kInvalidArgument, "temperature must be positive");
  const Matrix scaled = q / temperature;
  const Vector lse = logsumexp_rows(scaled);
  Matrix probs = (scaled.colwise() - lse).array().exp();
  for (Eigen::Index s = 0; s < probs.rows(); ++s) probs.row(s) /= probs.row(s).sum();
  return StochasticPolicy(std::move(probs));
}

SoftSolution soft_value_iteration(const TabularMdp& mdp, const RewardTable& reward, double tol,
                                  const Vector* warm_start) {
  require(tol > 0.0, ErrorCode::kInvalidArgument, "tolerance must be positive");
  check_reward_shape(mdp, reward);
  const Matrix& r = reward.values();
  Vector v = (warm_start != nullptr && warm_start->size() == mdp.n_states()) ? *warm_start
                                                                              : Vector::Zero(mdp.n_states());
  Matrix q;
  const double stop = std::max(tol, 1e-14 * (1.0 + r.cwiseAbs().maxCoeff()) / (1.0 - mdp.gamma()));
  int iterations = 0;
  for (; iterations < 1000000; ++iterations) {
    q = backup(mdp, r, v);
    const Vector next = logsumexp_rows(q);
    const double residual = (next - v).cwiseAbs().maxCoeff();
    v = next;
    if (residual <= stop) break;
  }
  q = backup(mdp, r, v);
  StochasticPolicy policy = boltzmann_policy(q, 1.0);
  return {std::move(policy), std::move(q), std::move(v), iterations + 1};
}

StochasticPolicy solve_soft(const TabularMdp& mdp, const RewardTable& reward, double tol) {
  return soft_value_iteration(mdp, reward, tol).policy;
}

// ---------------------------------------------------------------------------
// Sampling

int truncation_horizon(double gamma, double floor) {
  require(gamma > 0.0 && gamma < 1.0 && floor > 0.0 && floor < 1.0, ErrorCode::kInvalidArgument,
          "truncation horizon needs gamma and floor in (0,1)");
  return static_cast<int>(std::ceil(std::log(floor) / std::log(gamma))) + 1;
}

namespace {

int draw(std::mt19937_64& rng, const auto& probs) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double u = unit(rng);
  double acc = 0.0;
  const auto n = static_cast<int>(probs.size());
  int last_positive = 0;
  for (int i = 0; i < n; ++i) {
    const double p = probs(i);
    if (p <= 0.0) continue;
    last_positive = i;
    acc += p;
    if (u < acc) return i;
  }
  return last_positive;
}

}  // namespace

std::vector<Trajectory> sample_trajectories(const TabularMdp& mdp, const AnyPolicy& policy, int n, int horizon,
                                            std::uint64_t seed) {
  require(n >= 1 && horizon >= 1, ErrorCode::kInvalidArgument, "need n >= 1 and horizon >= 1");
  const MixedPolicy mixed = std::holds_alternative<MixedPolicy>(policy)
                                ? std::get<MixedPolicy>(policy)
                                : MixedPolicy({std::get<StochasticPolicy>(policy)}, Vector::Ones(1));
  check_policy_shape(mdp, mixed.n_states(), mixed.n_actions());
  std::mt19937_64 rng(seed);
  std::vector<Trajectory> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const auto& member = mixed.members()[static_cast<std::size_t>(draw(rng, mixed.weights()))];
    Trajectory traj;
    traj.horizon = horizon;
    traj.steps.reserve(static_cast<std::size_t>(horizon));
    int s = draw(rng, mdp.initial_dist());
    for (int t = 0; t < horizon; ++t) {
      const int a = draw(rng, member.probs().row(s));
      traj.steps.push_back({s, a, mdp.reward()(s, a)});
      s = draw(rng, mdp.next_state_row(s, a));
    }
    out.push_back(std::move(traj));
  }
  return out;
}

OccupancyMeasure empirical_occupancy(std::span<const Trajectory> trajectories, double gamma, int n_states,
                                     int n_actions) {
  require(!trajectories.empty(), ErrorCode::kEmptyDemonstrations, "no trajectories given");
  require(gamma > 0.0 && gamma < 1.0, ErrorCode::kInvalidArgument, "gamma must lie in (0,1)");
  Matrix rho = Matrix::Zero(n_states, n_actions);
  for (const auto& traj : trajectories) {
    double discount = 1.0;
    for (const auto& step : traj.steps) {
      require(step.state >= 0 && step.state < n_states && step.action >= 0 && step.action < n_actions,
              ErrorCode::kDimensionMismatch, "trajectory step out of range");
      rho(step.state, step.action) += discount;
      discount *= gamma;
    }
  }
  require(rho.sum() > 0.0, ErrorCode::kEmptyDemonstrations, "trajectories contain no steps");
  return OccupancyMeasure(rho / rho.sum());
}

MixResult mix_policies(std::vector<StochasticPolicy> members, const Vector& weights, const TabularMdp& mdp) {
  require(!members.empty(), ErrorCode::kInvalidArgument, "no mixture members");
  for (const auto& m : members) check_policy_shape(mdp, m.n_states(), m.n_actions());
  MixedPolicy mixed(std::move(members), weights);
  OccupancyMeasure occupancy = occupancy_of_policy(mdp, AnyPolicy(mixed));
  return {std::move(mixed), std::move(occupancy)};
}

StochasticPolicy random_policy(int n_states, int n_actions, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Matrix probs(n_states, n_actions);
  for (int s = 0; s < n_states; ++s) {
    for (int a = 0; a < n_actions; ++a) probs(s, a) = -std::log(1.0 - unit(rng));
    probs.row(s) /= probs.row(s).sum();
  }
  return StochasticPolicy(std::move(probs));
}

}  // namespace decoy

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

#include "decoy/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace decoy {

namespace {

constexpr double kTieTolerance = 1e-9;

// Weighted, centered, unit-norm copy of x. Throws when x is (numerically)
// constant under the weights.
Vector standardize(const Vector& x, const Vector& w, const char* what) {
  const double mean = w.dot(x);
  Vector centered = (x.array() - mean) * w.array().sqrt();
  const double norm = centered.norm();
  const double scale = x.cwiseAbs().maxCoeff();
  require(norm > 1e-12 * (1.0 + scale), ErrorCode::kDegenerateVariance, what);
  return centered / norm;
}

Vector as_vector(const Matrix& m) { return Eigen::Map<const Vector>(m.data(), m.size()); }

Vector resolve(const Vector& given, int n) {
  if (given.size() == 0) return Vector::Constant(n, 1.0 / n);
  require(given.size() == n, ErrorCode::kDimensionMismatch, "canonicalization distribution size mismatch");
  require((given.array() >= 0.0).all() && std::abs(given.sum() - 1.0) <= kProbabilityTolerance,
          ErrorCode::kInvalidArgument, "canonicalization distribution must be a probability vector");
  return given;
}

}  // namespace

double pearson(const RewardTable& r1, const RewardTable& r2) {
  require(r1.n_states() == r2.n_states() && r1.n_actions() == r2.n_actions(), ErrorCode::kDimensionMismatch,
          "pearson: reward shapes differ");
  const Eigen::Index n = r1.values().size();
  const Vector w = Vector::Constant(n, 1.0 / static_cast<double>(n));
  const Vector a = standardize(as_vector(r1.values()), w, "pearson: first reward is constant");
  const Vector b = standardize(as_vector(r2.values()), w, "pearson: second reward is constant");
  return std::clamp(a.dot(b), -1.0, 1.0);
}

Matrix lift_reward(const RewardTable& r) {
  const int n = r.n_states();
  const int m = r.n_actions();
  Matrix out(static_cast<Eigen::Index>(n) * m, n);
  for (int s = 0; s < n; ++s) {
    for (int a = 0; a < m; ++a) out.row(s * m + a).setConstant(r(s, a));
  }
  return out;
}

Matrix canonicalize(const Matrix& r3, int n_states, int n_actions, double gamma, const EpicDistributions& dist) {
  require(r3.rows() == static_cast<Eigen::Index>(n_states) * n_actions && r3.cols() == n_states,
          ErrorCode::kDimensionMismatch, "canonicalize: expected an (S*A) x S table");
  const Vector ds = resolve(dist.states, n_states);
  const Vector da = resolve(dist.actions, n_actions);

  // m(x) = E_{A, S'}[R(x, A, S')] for every state x.
  const Vector next_mean = r3 * ds;  // E_{S'} R(s, a, S'), per row
  Vector m(n_states);
  for (int x = 0; x < n_states; ++x) {
    double acc = 0.0;
    for (int a = 0; a < n_actions; ++a) acc += da(a) * next_mean(x * n_actions + a);
    m(x) = acc;
  }
  const double overall = ds.dot(m);

  Matrix out = r3;
  for (int s = 0; s < n_states; ++s) {
    for (int a = 0; a < n_actions; ++a) {
      auto row = out.row(s * n_actions + a);
      row += gamma * m.transpose();
      row.array() -= m(s) + gamma * overall;
    }
  }
  return out;
}

double epic(const Matrix& r1, const Matrix& r2, int n_states, int n_actions, double gamma,
            const EpicDistributions& dist) {
  require(r1.rows() == r2.rows() && r1.cols() == r2.cols(), ErrorCode::kDimensionMismatch,
          "epic: reward shapes differ");
  const Matrix c1 = canonicalize(r1, n_states, n_actions, gamma, dist);
  const Matrix c2 = canonicalize(r2, n_states, n_actions, gamma, dist);

  // Coverage weight D(s) D(a) D(s') in the same layout as c1.
  const Vector ds = resolve(dist.states, n_states);
  const Vector da = resolve(dist.actions, n_actions);
  Matrix weight(c1.rows(), c1.cols());
  for (int s = 0; s < n_states; ++s) {
    for (int a = 0; a < n_actions; ++a) weight.row(s * n_actions + a) = ds(s) * da(a) * ds.transpose();
  }
  const Vector w = as_vector(weight);
  const Vector a = standardize(as_vector(c1), w, "epic: first canonical reward is constant");
  const Vector b = standardize(as_vector(c2), w, "epic: second canonical reward is constant");
  // sqrt((1 - rho) / 2) == |a - b| / 2 for unit vectors; the latter keeps
  // identical inputs at exactly zero and is symmetric bit for bit.
  return std::clamp((a - b).norm() / 2.0, 0.0, 1.0);
}

double epic(const RewardTable& r1, const RewardTable& r2, double gamma, const EpicDistributions& dist) {
  require(r1.n_states() == r2.n_states() && r1.n_actions() == r2.n_actions(), ErrorCode::kDimensionMismatch,
          "epic: reward shapes differ");
  return epic(lift_reward(r1), lift_reward(r2), r1.n_states(), r1.n_actions(), gamma, dist);
}

RolloutResult rollout_eval(const TabularMdp& mdp, const RewardTable& r_true, const RewardTable& r_tilde) {
  require(r_true.n_states() == mdp.n_states() && r_tilde.n_states() == mdp.n_states() &&
              r_true.n_actions() == mdp.n_actions() && r_tilde.n_actions() == mdp.n_actions(),
          ErrorCode::kDimensionMismatch, "rollout_eval: reward shapes differ from the MDP");
  const double e_star = expected_return(occupancy_of_policy(mdp, solve_optimal(mdp, r_true).policy), r_true);
  RolloutResult out;
  out.rollout_return = expected_return(occupancy_of_policy(mdp, solve_optimal(mdp, r_tilde).policy), r_true);
  out.rollout_ratio = out.rollout_return / e_star;
  return out;
}

double ordering_consistency(const TabularMdp& mdp, const RewardTable& r_true, const RewardTable& r_tilde,
                            int n_pairs, std::uint64_t seed) {
  require(n_pairs >= 1, ErrorCode::kInvalidArgument, "n_pairs must be >= 1");
  std::mt19937_64 rng(seed);
  int agree = 0;
  for (int i = 0; i < n_pairs; ++i) {
    const auto first = occupancy_of_policy(mdp, random_policy(mdp.n_states(), mdp.n_actions(), rng));
    const auto second = occupancy_of_policy(mdp, random_policy(mdp.n_states(), mdp.n_actions(), rng));
    const double d_true = expected_return(first, r_true) - expected_return(second, r_true);
    const double d_tilde = expected_return(first, r_tilde) - expected_return(second, r_tilde);
    const bool tie = std::abs(d_true) <= kTieTolerance || std::abs(d_tilde) <= kTieTolerance;
    if (tie || (d_true > 0.0) == (d_tilde > 0.0)) ++agree;
  }
  return static_cast<double>(agree) / n_pairs;
}

MetricsReport evaluate_reward(const TabularMdp& mdp, const RewardTable& r_true, const RewardTable& r_tilde,
                              const MetricsRequest& request) {
  MetricsReport out;
  if (request.pearson) out.pearson = pearson(r_true, r_tilde);
  if (request.epic) out.epic = epic(r_true, r_tilde, mdp.gamma());
  if (request.rollout) {
    const RolloutResult rollout = rollout_eval(mdp, r_true, r_tilde);
    out.rollout_return = rollout.rollout_return;
    out.rollout_ratio = rollout.rollout_ratio;
  }
  if (request.ordering) {
    out.ordering_consistency = ordering_consistency(mdp, r_true, r_tilde, request.ordering_pairs, request.seed);
  }
  return out;
}

}  // namespace decoy

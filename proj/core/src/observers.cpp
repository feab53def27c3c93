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

#include "decoy/observers.hpp"

#include <cmath>
#include <deque>
#include <random>

namespace decoy {

void validate(const IrlConfig& config) {
  require(config.learning_rate > 0.0, ErrorCode::kValidationError, "learning_rate must be positive");
  require(config.lr_decay > 0.0 && config.lr_decay <= 1.0, ErrorCode::kValidationError, "lr_decay must lie in (0,1]");
  require(config.max_iters >= 1, ErrorCode::kValidationError, "max_iters must be >= 1");
  require(config.grad_tol > 0.0, ErrorCode::kValidationError, "grad_tol must be positive");
}

namespace {

constexpr double kInnerSoftTol = 1e-10;

void check_target(const TabularMdp& dynamics, const OccupancyMeasure& target) {
  require(target.n_states() == dynamics.n_states() && target.n_actions() == dynamics.n_actions(),
          ErrorCode::kDimensionMismatch, "target occupancy does not match the dynamics");
}

// Q = r + gamma * P v, reshaped to states x actions.
Matrix backup(const TabularMdp& mdp, const Matrix& r, const Vector& v) {
  const Vector pv = mdp.transition() * v;
  Matrix q(mdp.n_states(), mdp.n_actions());
  for (int s = 0; s < mdp.n_states(); ++s) {
    for (int a = 0; a < mdp.n_actions(); ++a) q(s, a) = r(s, a) + mdp.gamma() * pv(mdp.row_index(s, a));
  }
  return q;
}

Vector logsumexp_rows(const Matrix& q) {
  const Vector top = q.rowwise().maxCoeff();
  return top.array() + (q.colwise() - top).array().exp().rowwise().sum().log();
}

// Soft policy iteration (Newton's method on the soft Bellman equation),
// warm-started from the previous outer iterate. The gradient loop calls this
// thousands of times, and from a nearby start it needs two or three linear
// solves where value iteration needs hundreds of sweeps. Falls back to value
// iteration if it stalls.
SoftSolution soft_solve(const TabularMdp& mdp, const Matrix& r, double tol, const Vector& warm) {
  const int n = mdp.n_states();
  Vector v = warm;
  for (int k = 0; k < 50; ++k) {
    Matrix q = backup(mdp, r, v);
    const Vector lse = logsumexp_rows(q);
    const Matrix log_pi = q.colwise() - lse;
    if ((lse - v).cwiseAbs().maxCoeff() <= tol) {
      StochasticPolicy policy(log_pi.array().exp().matrix());
      return {std::move(policy), std::move(q), std::move(v), k + 1};
    }
    const Matrix pi = log_pi.array().exp().matrix();
    const Vector b = (pi.array() * (r - log_pi).array()).rowwise().sum();
    Matrix p_pi = Matrix::Zero(n, n);
    for (int s = 0; s < n; ++s) {
      for (int a = 0; a < mdp.n_actions(); ++a) p_pi.row(s) += pi(s, a) * mdp.next_state_row(s, a);
    }
    v = (Matrix::Identity(n, n) - mdp.gamma() * p_pi).partialPivLu().solve(b);
  }
  return soft_value_iteration(mdp, RewardTable(r), tol, &v);
}

}  // namespace

double mce_log_likelihood(const TabularMdp& dynamics, const OccupancyMeasure& target, const RewardTable& reward) {
  check_target(dynamics, target);
  const SoftSolution soft = soft_value_iteration(dynamics, reward, 1e-13);
  return expected_return(target, reward) - (1.0 - dynamics.gamma()) * dynamics.initial_dist().dot(soft.v);
}

RecoveredReward mce_irl(const TabularMdp& dynamics, const OccupancyMeasure& target, const IrlConfig& config) {
  validate(config);
  check_target(dynamics, target);
  const int n = dynamics.n_states();
  const int m = dynamics.n_actions();

  Matrix r = Matrix::Zero(n, m);
  if (config.init == IrlConfig::Init::kSeededUniform) {
    std::mt19937_64 rng(config.seed);
    std::uniform_real_distribution<double> unit(-0.5, 0.5);
    for (Eigen::Index i = 0; i < r.size(); ++i) r.data()[i] = unit(rng);
    if (config.features == IrlConfig::Features::kState) {
      for (int s = 0; s < n; ++s) r.row(s).setConstant(r(s, 0));
    }
  }
  const bool tied = config.features == IrlConfig::Features::kState;

  // Adam moments.
  constexpr double kBeta1 = 0.9;
  constexpr double kBeta2 = 0.999;
  constexpr double kEps = 1e-8;
  Matrix first = Matrix::Zero(n, m);
  Matrix second = Matrix::Zero(n, m);

  RecoveredReward out;
  Vector warm = Vector::Zero(n);
  double lr = config.learning_rate;
  double beta1_power = 1.0;
  double beta2_power = 1.0;
  for (int it = 1; it <= config.max_iters; ++it) {
    const SoftSolution soft = soft_solve(dynamics, r, kInnerSoftTol, warm);
    warm = soft.v;
    const OccupancyMeasure induced = occupancy_of_policy(dynamics, soft.policy);
    Matrix gradient = target.rho() - induced.rho();
    out.final_occupancy_gap = gradient.cwiseAbs().sum();
    out.iterations_used = it;
    if (tied) {
      // Chain rule through the broadcast; every column carries the state sum.
      const Vector per_state = gradient.rowwise().sum();
      gradient = per_state.replicate(1, m);
    }
    const double stop = tied ? gradient.col(0).cwiseAbs().sum() : out.final_occupancy_gap;
    if (stop <= config.grad_tol) {
      out.converged = true;
      break;
    }
    beta1_power *= kBeta1;
    beta2_power *= kBeta2;
    first = kBeta1 * first + (1.0 - kBeta1) * gradient;
    second = kBeta2 * second + (1.0 - kBeta2) * gradient.cwiseAbs2();
    const Matrix m_hat = first / (1.0 - beta1_power);
    const Matrix v_hat = second / (1.0 - beta2_power);
    r.array() += lr * m_hat.array() / (v_hat.array().sqrt() + kEps);
    lr *= config.lr_decay;
  }
  out.reward = RewardTable(std::move(r));
  return out;
}

RecoveredReward irl_from_demos(const TabularMdp& dynamics, std::span<const Trajectory> trajectories, double gamma,
                               const IrlConfig& config) {
  const OccupancyMeasure target =
      empirical_occupancy(trajectories, gamma, dynamics.n_states(), dynamics.n_actions());
  return mce_irl(dynamics, target, config);
}

OccupancyClusters cluster_occupancy(const TabularMdp& mdp, const OccupancyMeasure& rho, double mass_threshold) {
  require(mass_threshold > 0.0 && mass_threshold < 1.0, ErrorCode::kInvalidArgument,
          "mass_threshold must lie in (0,1)");
  check_target(mdp, rho);
  const int n = mdp.n_states();
  const Vector d = rho.state_visitation();
  const double cutoff = mass_threshold * d.maxCoeff();
  std::vector<char> kept(static_cast<std::size_t>(n), 0);
  bool any = false;
  for (int s = 0; s < n; ++s) {
    kept[static_cast<std::size_t>(s)] = d(s) > cutoff ? 1 : 0;
    any = any || kept[static_cast<std::size_t>(s)];
  }
  require(any, ErrorCode::kDegenerateSupport, "no state survives the mass threshold");

  auto linked = [&](int s, int t) {
    for (int a = 0; a < mdp.n_actions(); ++a) {
      if (mdp.p(s, a, t) > 0.0 || mdp.p(t, a, s) > 0.0) return true;
    }
    return false;
  };

  OccupancyClusters out;
  std::vector<int> label(static_cast<std::size_t>(n), -1);
  for (int root = 0; root < n; ++root) {
    if (!kept[static_cast<std::size_t>(root)] || label[static_cast<std::size_t>(root)] >= 0) continue;
    const int id = static_cast<int>(out.clusters.size());
    std::vector<int> members;
    std::deque<int> frontier{root};
    label[static_cast<std::size_t>(root)] = id;
    while (!frontier.empty()) {
      const int s = frontier.front();
      frontier.pop_front();
      members.push_back(s);
      for (int t = 0; t < n; ++t) {
        if (kept[static_cast<std::size_t>(t)] && label[static_cast<std::size_t>(t)] < 0 && linked(s, t)) {
          label[static_cast<std::size_t>(t)] = id;
          frontier.push_back(t);
        }
      }
    }
    std::sort(members.begin(), members.end());
    double mass = 0.0;
    for (int s : members) mass += d(s);
    out.clusters.push_back(std::move(members));
    out.masses.push_back(mass);
  }
  return out;
}

ClusteredRecovery irl_clustered(const TabularMdp& mdp, const OccupancyMeasure& rho, const IrlConfig& config,
                                ClusterMode mode, std::uint64_t seed, double mass_threshold) {
  const OccupancyClusters clusters = cluster_occupancy(mdp, rho, mass_threshold);
  std::size_t chosen = 0;
  if (mode == ClusterMode::kMax) {
    for (std::size_t i = 1; i < clusters.masses.size(); ++i) {
      if (clusters.masses[i] > clusters.masses[chosen]) chosen = i;
    }
  } else {
    std::mt19937_64 rng(seed);
    chosen = std::uniform_int_distribution<std::size_t>(0, clusters.clusters.size() - 1)(rng);
  }
  Matrix restricted = Matrix::Zero(rho.n_states(), rho.n_actions());
  for (int s : clusters.clusters[chosen]) restricted.row(s) = rho.rho().row(s);
  restricted /= restricted.sum();

  ClusteredRecovery out;
  out.chosen_cluster = static_cast<int>(chosen);
  out.restricted_target = OccupancyMeasure(std::move(restricted));
  out.recovered = mce_irl(mdp, out.restricted_target, config);
  return out;
}

}  // namespace decoy

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

#include "decoy/antireward.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <random>

namespace decoy {

std::string to_string(DivergenceKind kind) {
  switch (kind) {
    case DivergenceKind::kForwardKL: return "forward_kl";
    case DivergenceKind::kBackwardKL: return "backward_kl";
    case DivergenceKind::kJensenShannon: return "jensen_shannon";
    case DivergenceKind::kPearsonChi2: return "pearson_chi2";
    case DivergenceKind::kSquaredHellinger: return "squared_hellinger";
    case DivergenceKind::kTotalVariation: return "total_variation";
    case DivergenceKind::kWasserstein1: return "wasserstein1";
  }
  return "unknown";
}

std::string to_string(const AntiRewardKind& kind) {
  if (std::holds_alternative<TrajectoryKL>(kind)) return "trajectory_kl";
  return to_string(std::get<DivergenceKind>(kind));
}

AntiRewardKind parse_anti_reward_kind(const std::string& name) {
  if (name == "trajectory_kl") return TrajectoryKL{};
  for (DivergenceKind kind : kAllDivergences) {
    if (to_string(kind) == name) return kind;
  }
  throw Error(ErrorCode::kValidationError, "unknown anti-reward kind '" + name + "'");
}

void validate(const AntiRewardConfig& config) {
  require(config.iterations >= 1, ErrorCode::kValidationError, "anti-reward iterations must be >= 1");
  require(config.smoothing_eps > 0.0, ErrorCode::kValidationError, "smoothing_eps must be positive");
  require(config.merl_temperature > 0.0, ErrorCode::kValidationError, "merl_temperature must be positive");
  require(config.critic_iterations >= 1, ErrorCode::kValidationError, "critic_iterations must be >= 1");
  if (config.clip) {
    require(config.clip->first <= config.clip->second, ErrorCode::kValidationError, "clip range is empty");
  }
}

// ---------------------------------------------------------------------------
// Closed forms

double closed_form_entry(DivergenceKind kind, double rho_star, double rho_minus, double floor) {
  const double a = std::max(rho_star, floor);
  const double b = std::max(rho_minus, floor);
  switch (kind) {
    case DivergenceKind::kForwardKL: return b / a;
    case DivergenceKind::kBackwardKL: return -(1.0 + std::log(a / b));
    case DivergenceKind::kJensenShannon: return std::log(0.5 * (1.0 + b / a));
    case DivergenceKind::kPearsonChi2: return 2.0 * (1.0 - a / b);
    case DivergenceKind::kSquaredHellinger: return std::sqrt(b / a) - 1.0;
    case DivergenceKind::kTotalVariation: {
      // Maximizer of (b - a) u over u in [0, 2]; ties sit at the midpoint.
      const double t = 1.0 - a / b;
      const double sign = t > 0.0 ? 1.0 : (t < 0.0 ? -1.0 : 0.0);
      return 1.0 + sign;
    }
    case DivergenceKind::kWasserstein1: break;
  }
  throw Error(ErrorCode::kInvalidArgument, "Wasserstein-1 has no closed form; use wasserstein1_critic");
}

RewardTable f_div_closed_form(const OccupancyMeasure& rho_star, const OccupancyMeasure& rho_minus,
                              DivergenceKind kind, double smoothing_eps) {
  require(rho_star.n_states() == rho_minus.n_states() && rho_star.n_actions() == rho_minus.n_actions(),
          ErrorCode::kDimensionMismatch, "occupancy measures differ in shape");
  require(smoothing_eps > 0.0, ErrorCode::kInvalidArgument, "smoothing_eps must be positive");
  Matrix out(rho_star.n_states(), rho_star.n_actions());
  for (int s = 0; s < rho_star.n_states(); ++s) {
    for (int a = 0; a < rho_star.n_actions(); ++a) {
      out(s, a) = closed_form_entry(kind, rho_star(s, a), rho_minus(s, a), smoothing_eps);
    }
  }
  return RewardTable(std::move(out));
}

// ---------------------------------------------------------------------------
// Wasserstein-1 critic

Matrix hop_distance(const TabularMdp& mdp) {
  const int n = mdp.n_states();
  std::vector<std::vector<int>> adjacent(static_cast<std::size_t>(n));
  for (int s = 0; s < n; ++s) {
    for (int t = 0; t < n; ++t) {
      if (s == t) continue;
      bool linked = false;
      for (int a = 0; a < mdp.n_actions() && !linked; ++a) linked = mdp.p(s, a, t) > 0.0 || mdp.p(t, a, s) > 0.0;
      if (linked) adjacent[static_cast<std::size_t>(s)].push_back(t);
    }
  }
  const double unreachable = static_cast<double>(n);
  Matrix dist = Matrix::Constant(n, n, unreachable);
  for (int src = 0; src < n; ++src) {
    dist(src, src) = 0.0;
    std::deque<int> frontier{src};
    while (!frontier.empty()) {
      const int s = frontier.front();
      frontier.pop_front();
      for (int t : adjacent[static_cast<std::size_t>(s)]) {
        if (dist(src, t) > dist(src, s) + 1.0) {
          dist(src, t) = dist(src, s) + 1.0;
          frontier.push_back(t);
        }
      }
    }
  }
  return dist;
}

namespace {

struct Slab {
  int x;
  int y;
  double bound;
};

// Pairs whose constraint is not already implied through an intermediate point.
std::vector<Slab> essential_pairs(const Matrix& d) {
  const auto n = static_cast<int>(d.rows());
  std::vector<Slab> out;
  for (int x = 0; x < n; ++x) {
    for (int y = x + 1; y < n; ++y) {
      bool implied = false;
      for (int z = 0; z < n && !implied; ++z) {
        if (z == x || z == y) continue;
        implied = d(x, z) + d(z, y) <= d(x, y) && d(x, z) > 0.0 && d(z, y) > 0.0;
      }
      if (!implied) out.push_back({x, y, d(x, y)});
    }
  }
  return out;
}

// Dykstra's alternating projections onto the slabs |f(x) - f(y)| <= d(x,y).
Vector project_lipschitz(const Vector& start, const std::vector<Slab>& slabs, int max_sweeps, double tol) {
  Vector f = start;
  std::vector<double> increment(slabs.size(), 0.0);  // along e_x - e_y
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double moved = 0.0;
    for (std::size_t k = 0; k < slabs.size(); ++k) {
      const auto& c = slabs[k];
      // y = f + increment_k (increment lives on e_x - e_y).
      const double fx = f(c.x) + increment[k];
      const double fy = f(c.y) - increment[k];
      const double diff = fx - fy;
      const double clamped = std::clamp(diff, -c.bound, c.bound);
      const double shift = 0.5 * (diff - clamped);
      const double new_fx = fx - shift;
      const double new_fy = fy + shift;
      moved = std::max(moved, std::abs(new_fx - f(c.x)) + std::abs(new_fy - f(c.y)));
      increment[k] = shift;
      f(c.x) = new_fx;
      f(c.y) = new_fy;
    }
    if (moved < tol) break;
  }
  return f;
}

}  // namespace

CriticResult wasserstein1_critic(const OccupancyMeasure& rho_star, const OccupancyMeasure& rho_minus,
                                 const Matrix& ground_metric, int iterations) {
  const int n = rho_star.n_states();
  require(rho_minus.n_states() == n && rho_minus.n_actions() == rho_star.n_actions(), ErrorCode::kDimensionMismatch,
          "occupancy measures differ in shape");
  require(ground_metric.rows() == n && ground_metric.cols() == n, ErrorCode::kDimensionMismatch,
          "ground metric must be n_states x n_states");
  require(ground_metric.minCoeff() >= 0.0 && ground_metric.isApprox(ground_metric.transpose()),
          ErrorCode::kInvalidArgument, "ground metric must be non-negative and symmetric");
  require(iterations >= 1, ErrorCode::kInvalidArgument, "critic needs at least one iteration");

  const Vector gradient = rho_minus.state_visitation() - rho_star.state_visitation();
  const std::vector<Slab> slabs = essential_pairs(ground_metric);
  Vector f = Vector::Zero(n);
  const double peak = gradient.cwiseAbs().maxCoeff();
  if (peak > 0.0) {
    // Constant steps: the objective is linear, so projected ascent settles on
    // the optimal face once the step dominates the projection error.
    const double diameter = std::max(1.0, ground_metric.maxCoeff());
    const double step = diameter / peak;
    for (int t = 0; t < iterations; ++t) {
      const Vector next = project_lipschitz(f + step * gradient, slabs, 2000, 1e-12);
      const double change = (next - f).cwiseAbs().maxCoeff();
      f = next;
      if (change < 1e-12) break;
    }
    // Lower Lipschitz envelope: exact feasibility for any metric input.
    Vector envelope = f;
    for (int x = 0; x < n; ++x) {
      for (int y = 0; y < n; ++y) envelope(x) = std::min(envelope(x), f(y) + ground_metric(x, y));
    }
    f = envelope;
  }

  double violation = 0.0;
  for (int x = 0; x < n; ++x) {
    for (int y = 0; y < n; ++y) violation = std::max(violation, std::abs(f(x) - f(y)) - ground_metric(x, y));
  }
  CriticResult out;
  out.objective = gradient.dot(f);
  out.lipschitz_violation = std::max(violation, 0.0);
  out.reward = RewardTable(f.replicate(1, rho_star.n_actions()));
  return out;
}

// ---------------------------------------------------------------------------
// Trajectory KL

RewardTable neg_log_policy(const StochasticPolicy& policy) {
  require(policy.probs().minCoeff() > 0.0, ErrorCode::kInvalidArgument, "policy must have full support");
  return RewardTable(-policy.probs().array().log().matrix());
}

RewardTable traj_kl_anti_reward(const TabularMdp& mdp, const RewardTable& reward, double merl_temperature) {
  require(merl_temperature > 0.0, ErrorCode::kInvalidArgument, "merl_temperature must be positive");
  const SoftSolution soft = soft_value_iteration(mdp, reward.scaled(1.0 / merl_temperature), 1e-11);
  // -log pi = V - Q, evaluated in log space so it stays finite.
  return RewardTable((-soft.q).colwise() + soft.v);
}

// ---------------------------------------------------------------------------
// Algorithm loop

double occupancy_overlap(const OccupancyMeasure& a, const OccupancyMeasure& b) {
  return a.rho().cwiseMin(b.rho()).sum();
}

namespace {

RewardTable clip_reward(const RewardTable& r, const std::optional<std::pair<double, double>>& clip) {
  if (!clip) return r;
  return RewardTable(r.values().cwiseMax(clip->first).cwiseMin(clip->second));
}

}  // namespace

AntiReward gen_anti_reward(const TabularMdp& mdp, const RewardTable& reward, const AntiRewardConfig& config) {
  validate(config);
  const OccupancyMeasure o_star =
      occupancy_of_policy(mdp, solve_soft(mdp, reward.scaled(1.0 / config.merl_temperature), 1e-11));
  std::mt19937_64 rng(config.seed);
  const OccupancyMeasure o_init =
      config.init == OccupancyInit::kUniform
          ? occupancy_of_policy(mdp, StochasticPolicy::uniform(mdp.n_states(), mdp.n_actions()))
          : occupancy_of_policy(mdp, random_policy(mdp.n_states(), mdp.n_actions(), rng));

  AntiReward out;
  out.diagnostics.overlap.push_back(occupancy_overlap(o_star, o_init));

  if (std::holds_alternative<TrajectoryKL>(config.kind)) {
    out.reward = clip_reward(traj_kl_anti_reward(mdp, reward, config.merl_temperature), config.clip);
    const auto o_minus = occupancy_of_policy(mdp, solve_optimal(mdp, out.reward).policy);
    out.diagnostics.overlap.push_back(occupancy_overlap(o_star, o_minus));
    return out;
  }

  const DivergenceKind kind = std::get<DivergenceKind>(config.kind);
  const Matrix metric = kind == DivergenceKind::kWasserstein1 ? hop_distance(mdp) : Matrix();
  OccupancyMeasure o_minus = o_init;
  for (int it = 0; it < config.iterations; ++it) {
    if (kind == DivergenceKind::kWasserstein1) {
      CriticResult critic = wasserstein1_critic(o_star, o_minus, metric, config.critic_iterations);
      out.diagnostics.critic_violation = critic.lipschitz_violation;
      out.reward = std::move(critic.reward);
    } else {
      out.reward = f_div_closed_form(o_star, o_minus, kind, config.smoothing_eps);
    }
    out.reward = clip_reward(out.reward, config.clip);
    o_minus = occupancy_of_policy(mdp, solve_optimal(mdp, out.reward).policy);
    out.diagnostics.overlap.push_back(occupancy_overlap(o_star, o_minus));
  }
  return out;
}

}  // namespace decoy

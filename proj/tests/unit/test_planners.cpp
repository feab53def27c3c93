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

#include <cmath>
#include <random>

#include <doctest.h>

#include "decoy/antireward.hpp"
#include "decoy/environments.hpp"
#include "decoy/planners.hpp"
#include "oracles.hpp"

using namespace decoy;

namespace {

double anti_return(const TabularMdp& mdp, const AnyPolicy& policy, const RewardTable& anti) {
  return expected_return(occupancy_of_policy(mdp, policy), anti);
}

RewardTable random_table(int n, int m, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  Matrix r(n, m);
  for (Eigen::Index i = 0; i < r.size(); ++i) r.data()[i] = unit(rng);
  return RewardTable(r);
}

}  // namespace

TEST_CASE("reference returns on a one-state bandit") {
  const TabularMdp mdp(1, 2, Matrix::Ones(2, 1), RewardTable((Matrix(1, 2) << 0.0, 1.0).finished()), 0.5,
                       Vector::Ones(1));
  const ReferenceReturns ref = reference_returns(mdp, mdp.reward());
  CHECK(ref.e_hat == doctest::Approx(0.5));
  CHECK(ref.e_star == doctest::Approx(1.0));
  CHECK_FALSE(ref.e_minus.has_value());
}

TEST_CASE("reference returns: E* >= E_hat, and -r gives the minimum") {
  const TabularMdp mdp = oracle::random_mdp(4, 2, 0.9, 8);
  const ReferenceReturns ref = reference_returns(mdp, mdp.reward(), nullptr);
  CHECK(ref.e_star >= ref.e_hat);
  const RewardTable neg = mdp.reward().scaled(-1.0);
  const ReferenceReturns with = reference_returns(mdp, mdp.reward(), &neg);
  double lowest = 1e9;
  for (const auto& actions : oracle::all_deterministic(4, 2)) {
    const Matrix rho = oracle::occupancy_by_iteration(mdp, oracle::one_hot_policy(actions, 2));
    lowest = std::min(lowest, (rho.array() * mdp.reward().values().array()).sum());
  }
  CHECK(*with.e_minus == doctest::Approx(lowest).epsilon(1e-9));
}

TEST_CASE("constraint resolution") {
  CHECK(RewardConstraint::fraction(0.25).resolve(1.0, 3.0) == doctest::Approx(1.5));
  CHECK(RewardConstraint::absolute(2.0).resolve(1.0, 3.0) == 2.0);
  CHECK_THROWS_AS(RewardConstraint::absolute(3.5).resolve(1.0, 3.0), Error);
  CHECK_THROWS_AS(RewardConstraint::fraction(-0.1).resolve(1.0, 3.0), Error);
}

TEST_CASE("meir: uniform at the bottom, tight in the interior, equal to the soft solve at its own lambda") {
  const TabularMdp mdp = make_random_mdp({28, 3, 0.9, 4});
  const ReferenceReturns ref = reference_returns(mdp, mdp.reward());

  const PlannerResult low = meir(mdp, mdp.reward(), RewardConstraint::absolute(ref.e_hat));
  CHECK(low.lambda_star == doctest::Approx(0.0));
  const auto& pi_low = std::get<StochasticPolicy>(low.policy);
  CHECK((pi_low.probs().array() - 1.0 / 3.0).abs().maxCoeff() < 1e-9);

  double previous_entropy = 1e9;
  for (double frac : {0.2, 0.4, 0.6, 0.8}) {
    const PlannerResult res = meir(mdp, mdp.reward(), RewardConstraint::fraction(frac));
    CHECK(res.e_min == doctest::Approx(ref.e_hat + frac * (ref.e_star - ref.e_hat)));
    CHECK(std::abs(res.achieved_return - res.e_min) <= 1e-3);
    CHECK(res.lambda_star >= 0.0);
    // The reported policy is the soft-optimal policy of lambda* r.
    const StochasticPolicy again = solve_soft(mdp, mdp.reward().scaled(res.lambda_star), 1e-12);
    CHECK((again.probs() - std::get<StochasticPolicy>(res.policy).probs()).cwiseAbs().maxCoeff() < 1e-8);
    CHECK(res.achieved_objective <= previous_entropy + 1e-12);
    previous_entropy = res.achieved_objective;
  }

  CHECK_THROWS_AS(meir(mdp, mdp.reward(), RewardConstraint::absolute(ref.e_star + 1.0)), Error);
  CHECK_THROWS_AS(meir(mdp, mdp.reward(), RewardConstraint::absolute(ref.e_hat - 1.0)), Error);
}

TEST_CASE("meir: soft return is increasing along a lambda sweep") {
  const TabularMdp mdp = make_random_mdp({28, 3, 0.9, 9});
  double previous = -1e9;
  for (double lambda = 0.0; lambda <= 50.0; lambda += 2.5) {
    const StochasticPolicy pi = solve_soft(mdp, mdp.reward().scaled(lambda));
    const double ret = expected_return(occupancy_of_policy(mdp, pi), mdp.reward());
    CHECK(ret >= previous - 1e-12);
    previous = ret;
  }
}

TEST_CASE("mm binary search: limits and feasibility in both modes") {
  const TabularMdp mdp = make_random_mdp({28, 3, 0.9, 5});
  const RewardTable anti = traj_kl_anti_reward(mdp, mdp.reward(), 1.0);
  const ReferenceReturns ref = reference_returns(mdp, mdp.reward(), &anti);

  const PlannerResult bottom = mm_binary_search(mdp, mdp.reward(), anti, RewardConstraint::fraction(0.0));
  CHECK(bottom.lambda_star == 0.0);
  const StochasticPolicy anti_opt = solve_optimal(mdp, anti).policy;
  CHECK(std::get<StochasticPolicy>(bottom.policy).probs() == anti_opt.probs());

  const PlannerResult top = mm_binary_search(mdp, mdp.reward(), anti, RewardConstraint::fraction(1.0));
  CHECK(top.achieved_return == doctest::Approx(ref.e_star).epsilon(1e-9));

  double previous_objective = 1e9;
  for (double frac = 0.1; frac < 0.95; frac += 0.1) {
    for (MmMode mode : {MmMode::kFeasible, MmMode::kExact}) {
      MmOptions opts;
      opts.mode = mode;
      const PlannerResult res = mm_binary_search(mdp, mdp.reward(), anti, RewardConstraint::fraction(frac), opts);
      CHECK(res.achieved_return >= res.e_min - 1e-6);
      CHECK(res.lambda_star >= 0.0);
      CHECK(res.achieved_objective == doctest::Approx(anti_return(mdp, res.policy, anti)));
      if (mode == MmMode::kExact) {
        CHECK(res.lambda_star * (res.achieved_return - res.e_min) <= 1e-6);
        CHECK(res.achieved_objective <= previous_objective + 1e-9);
        previous_objective = res.achieved_objective;
      }
    }
  }
}

TEST_CASE("mm: the dual return is nondecreasing in lambda") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const TabularMdp mdp = oracle::random_mdp(6, 3, 0.9, 50 + seed);
    const RewardTable anti = random_table(6, 3, 90 + seed);
    double previous = -1e9;
    for (double lambda = 0.0; lambda <= 20.0; lambda += 0.25) {
      const RewardTable mixed = mdp.reward().scaled(lambda) + anti;
      const StochasticPolicy pi = solve_optimal(mdp, mixed).policy;
      const double ret = expected_return(occupancy_of_policy(mdp, pi), mdp.reward());
      CHECK(ret >= previous - 1e-9);
      previous = ret;
    }
  }
}

TEST_CASE("mm exact matches the enumerated occupancy LP on tiny MDPs") {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const TabularMdp mdp = oracle::random_mdp(4, 2, 0.9, 200 + seed);
    const RewardTable anti = random_table(4, 2, 300 + seed);
    const PlannerResult res = mm_binary_search(mdp, mdp.reward(), anti, RewardConstraint::fraction(0.5));
    const double lp = oracle::occupancy_lp_optimum(mdp, mdp.reward().values(), anti.values(), res.e_min);
    CHECK(res.achieved_objective == doctest::Approx(lp).epsilon(1e-3));
  }
}

TEST_CASE("mm primal-dual: projected, cross-checked against binary search") {
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const TabularMdp mdp = oracle::random_mdp(4, 2, 0.9, 400 + seed);
    const RewardTable anti = random_table(4, 2, 500 + seed);
    const RewardConstraint c = RewardConstraint::fraction(0.5);
    const PlannerResult exact = mm_binary_search(mdp, mdp.reward(), anti, c);
    PrimalDualOptions opts;
    opts.iterations = 20000;
    opts.alpha = 0.1;
    const PlannerResult pd = mm_primal_dual(mdp, mdp.reward(), anti, c, opts);
    CHECK(pd.lambda_star >= 0.0);
    CHECK(std::abs(pd.achieved_objective - exact.achieved_objective) <= 5e-3);
  }
}

TEST_CASE("mm primal-dual: a huge start lambda comes down") {
  const TabularMdp mdp = oracle::random_mdp(4, 2, 0.9, 400);
  const RewardTable anti = random_table(4, 2, 500);
  PrimalDualOptions opts;
  opts.lambda0 = 1e3;
  opts.iterations = 2;
  const PlannerResult pd = mm_primal_dual(mdp, mdp.reward(), anti, RewardConstraint::fraction(0.3), opts);
  CHECK(pd.lambda_star < 1e3);
}

TEST_CASE("mmbe: temperature limits and surfaced deviation") {
  // Trajectory KL at lambda = 1 is pure shaping (all actions tie), so a
  // generic anti-reward is used to keep the argmax well defined.
  const TabularMdp mdp = make_random_mdp({28, 4, 0.9, 12});
  const RewardTable anti = random_table(28, 4, 12);
  const RewardConstraint c = RewardConstraint::fraction(0.5);
  MmOptions feasible;
  feasible.mode = MmMode::kFeasible;
  const PlannerResult mm = mm_binary_search(mdp, mdp.reward(), anti, c, feasible);
  const PlannerResult cold = mmbe(mdp, mdp.reward(), anti, c, 1e-3);
  const auto& pi_mm = std::get<StochasticPolicy>(mm.policy);
  const auto& pi_cold = std::get<StochasticPolicy>(cold.policy);
  for (int s = 0; s < mdp.n_states(); ++s) CHECK(pi_cold.argmax(s) == pi_mm.argmax(s));

  const PlannerResult hot = mmbe(mdp, mdp.reward(), anti, c, 1e3);
  const OccupancyMeasure rho = occupancy_of_policy(mdp, hot.policy);
  CHECK(causal_entropy(rho) >= 0.99 * std::log(4.0));
  CHECK(hot.constraint_deviation() == doctest::Approx(hot.achieved_return - hot.e_min));
}

TEST_CASE("mm_mix: single member equals MM; mixture is linear and feasible") {
  const TabularMdp mdp = make_four_rooms(FourRoomsSpec{});
  AntiRewardConfig cfg;
  cfg.kind = DivergenceKind::kForwardKL;
  cfg.init = OccupancyInit::kRandom;
  const AntiRewardGenerator gen = [&](std::uint64_t seed) {
    AntiRewardConfig c = cfg;
    c.seed = seed;
    return gen_anti_reward(mdp, mdp.reward(), c).reward;
  };
  const RewardConstraint c = RewardConstraint::fraction(0.4);

  MmMixOptions one;
  one.n_mix = 1;
  const MmMixResult single = mm_mix(mdp, mdp.reward(), gen, c, one);
  const PlannerResult direct = mm_binary_search(mdp, mdp.reward(), gen(1), c, one.member);
  CHECK(single.result.achieved_return == doctest::Approx(direct.achieved_return));

  MmMixOptions three;
  three.n_mix = 3;
  const MmMixResult mix = mm_mix(mdp, mdp.reward(), gen, c, three);
  REQUIRE(mix.members.size() == 3);
  double weighted = 0.0;
  for (const auto& m : mix.members) {
    weighted += m.achieved_return / 3.0;
    CHECK(m.achieved_return >= mix.result.e_min - 1e-6);
  }
  CHECK(mix.result.achieved_return == doctest::Approx(weighted));
  CHECK(mix.result.achieved_return >= mix.result.e_min - 1e-6);

  // Diversity: the union of state-action supports is strictly larger than any
  // member's (every state carries initial mass, so state supports are full).
  std::vector<Matrix> occ;
  for (const auto& m : mix.members) occ.push_back(occupancy_of_policy(mdp, m.policy).rho());
  int union_support = 0;
  std::vector<int> member_support(occ.size(), 0);
  for (Eigen::Index k = 0; k < occ[0].size(); ++k) {
    bool any = false;
    for (std::size_t i = 0; i < occ.size(); ++i) {
      if (occ[i].data()[k] > 1e-9) {
        any = true;
        ++member_support[i];
      }
    }
    union_support += any;
  }
  for (int size : member_support) CHECK(union_support > size);
}

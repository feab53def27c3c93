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

#include <benchmark/benchmark.h>

#include "decoy/antireward.hpp"
#include "decoy/environments.hpp"
#include "decoy/metrics.hpp"
#include "decoy/observers.hpp"
#include "decoy/planners.hpp"

namespace {

decoy::TabularMdp random_mdp(int n_states, int n_actions) {
  return decoy::make_random_mdp({n_states, n_actions, 0.9, 7});
}

void BM_Occupancy(benchmark::State& state) {
  const auto mdp = random_mdp(static_cast<int>(state.range(0)), 4);
  const auto policy = decoy::StochasticPolicy::uniform(mdp.n_states(), mdp.n_actions());
  for (auto _ : state) benchmark::DoNotOptimize(decoy::occupancy_of_policy(mdp, policy));
}
BENCHMARK(BM_Occupancy)->Arg(28)->Arg(40);

void BM_SolveOptimal(benchmark::State& state) {
  const auto mdp = random_mdp(static_cast<int>(state.range(0)), 4);
  for (auto _ : state) benchmark::DoNotOptimize(decoy::solve_optimal(mdp, mdp.reward()));
}
BENCHMARK(BM_SolveOptimal)->Arg(28)->Arg(40);

void BM_SolveSoft(benchmark::State& state) {
  const auto mdp = random_mdp(static_cast<int>(state.range(0)), 4);
  for (auto _ : state) benchmark::DoNotOptimize(decoy::solve_soft(mdp, mdp.reward()));
}
BENCHMARK(BM_SolveSoft)->Arg(28)->Arg(40);

void BM_Meir(benchmark::State& state) {
  const auto mdp = random_mdp(32, 4);
  for (auto _ : state) {
    benchmark::DoNotOptimize(decoy::meir(mdp, mdp.reward(), decoy::RewardConstraint::fraction(0.5)));
  }
}
BENCHMARK(BM_Meir)->Unit(benchmark::kMillisecond);

void BM_MmBinarySearch(benchmark::State& state) {
  const auto mdp = random_mdp(32, 4);
  const auto anti = decoy::traj_kl_anti_reward(mdp, mdp.reward(), 1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        decoy::mm_binary_search(mdp, mdp.reward(), anti, decoy::RewardConstraint::fraction(0.5)));
  }
}
BENCHMARK(BM_MmBinarySearch)->Unit(benchmark::kMillisecond);

void BM_MceIrl(benchmark::State& state) {
  const auto mdp = random_mdp(32, 4);
  const auto target = decoy::occupancy_of_policy(mdp, decoy::solve_soft(mdp, mdp.reward().scaled(5.0)));
  decoy::IrlConfig config;
  config.features = decoy::IrlConfig::Features::kState;
  for (auto _ : state) benchmark::DoNotOptimize(decoy::mce_irl(mdp, target, config));
}
BENCHMARK(BM_MceIrl)->Unit(benchmark::kMillisecond);

void BM_Epic(benchmark::State& state) {
  const auto mdp = random_mdp(40, static_cast<int>(state.range(0)));
  const auto other = decoy::make_random_mdp({40, static_cast<int>(state.range(0)), 0.9, 8}).reward();
  for (auto _ : state) benchmark::DoNotOptimize(decoy::epic(mdp.reward(), other, 0.9));
}
BENCHMARK(BM_Epic)->Arg(4)->Arg(15);

void BM_AntiRewardClosedForm(benchmark::State& state) {
  const auto mdp = random_mdp(32, 4);
  decoy::AntiRewardConfig config;
  config.kind = decoy::DivergenceKind::kJensenShannon;
  for (auto _ : state) benchmark::DoNotOptimize(decoy::gen_anti_reward(mdp, mdp.reward(), config));
}
BENCHMARK(BM_AntiRewardClosedForm)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

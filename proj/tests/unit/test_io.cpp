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

#include <filesystem>
#include <functional>
#include <random>

#include <doctest.h>

#include "decoy/environments.hpp"
#include "decoy/io.hpp"
#include "oracles.hpp"

using namespace decoy;

namespace {

bool throws_code(ErrorCode code, const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code() == code;
  }
  return false;
}

}  // namespace

TEST_CASE("mdp documents round-trip byte for byte") {
  const TabularMdp mdp = make_frozen_lake(FrozenLakeSpec{});
  const std::string text = io::mdp_to_json(mdp);
  const TabularMdp back = io::mdp_from_json(text);
  CHECK(back.transition() == mdp.transition());
  CHECK(back.reward().values() == mdp.reward().values());
  CHECK(back.initial_dist() == mdp.initial_dist());
  CHECK(back.gamma() == mdp.gamma());
  CHECK(io::mdp_to_json(back) == text);
}

TEST_CASE("policies round-trip, stochastic and mixed") {
  std::mt19937_64 rng(1);
  const StochasticPolicy a = random_policy(4, 3, rng);
  const StochasticPolicy b = random_policy(4, 3, rng);
  const std::string one = io::policy_to_json(AnyPolicy(a));
  CHECK(std::get<StochasticPolicy>(io::policy_from_json(one)).probs() == a.probs());
  CHECK(io::policy_to_json(io::policy_from_json(one)) == one);

  const MixedPolicy mix({a, b}, (Vector(2) << 0.25, 0.75).finished());
  const std::string two = io::policy_to_json(AnyPolicy(mix));
  const auto back = std::get<MixedPolicy>(io::policy_from_json(two));
  CHECK(back.weights() == mix.weights());
  CHECK(back.members()[1].probs() == b.probs());
  CHECK(io::policy_to_json(AnyPolicy(back)) == two);
}

TEST_CASE("rewards keep their provenance") {
  const RewardTable r((Matrix(2, 2) << 0.1, -2.5, 1e-300, 3.0).finished());
  const io::RewardProvenance prov{"forward_kl", 5, 42, 1.0};
  const std::string text = io::reward_to_json(r, prov);
  CHECK(io::reward_from_json(text).values() == r.values());
  const auto got = io::reward_provenance_from_json(text);
  REQUIRE(got.has_value());
  CHECK(got->kind == "forward_kl");
  CHECK(got->iterations == 5);
  CHECK(got->seed == 42);
  CHECK_FALSE(io::reward_provenance_from_json(io::reward_to_json(r)).has_value());
}

TEST_CASE("occupancy and recovered-reward documents") {
  const OccupancyMeasure rho((Matrix(2, 1) << 0.25, 0.75).finished());
  CHECK(io::occupancy_from_json(io::occupancy_to_json(rho)).rho() == rho.rho());
  RecoveredReward rec{RewardTable::zeros(2, 2), 0.5, 10, false};
  // A recovered reward document is readable as a reward.
  CHECK(io::reward_from_json(io::recovered_reward_to_json(rec)).values() == rec.reward.values());
}

TEST_CASE("metrics documents write null for missing fields") {
  MetricsReport rep;
  rep.pearson = 0.5;
  const std::string text = io::metrics_to_json(rep);
  CHECK(text.find("\"epic\": null") != std::string::npos);
  CHECK(text.find("\"pearson\": 0.5") != std::string::npos);
}

TEST_CASE("strict readers reject unknown keys, wrong types and bad syntax") {
  CHECK(throws_code(ErrorCode::kParseError, [] { io::reward_from_json(R"({"reward": [[1]], "extra": 1})"); }));
  CHECK(throws_code(ErrorCode::kParseError, [] { io::reward_from_json(R"({"reward": "oops"})"); }));
  CHECK(throws_code(ErrorCode::kParseError, [] { io::reward_from_json(R"({"reward": [[1], [2, 3]]})"); }));
  CHECK(throws_code(ErrorCode::kParseError, [] { io::occupancy_from_json("{\"rho\": [[1]"); }));
  CHECK(throws_code(ErrorCode::kParseError, [] { io::policy_from_json(R"({"type": "greedy", "probs": [[1]]})"); }));
  CHECK(throws_code(ErrorCode::kParseError, [] { io::mdp_from_json(R"({"n_states": 1})"); }));
}

TEST_CASE("file helpers create directories and report missing files") {
  const auto dir = std::filesystem::temp_directory_path() / "decoy_io_test" / "nested";
  std::filesystem::remove_all(dir.parent_path());
  const std::string path = (dir / "x.json").string();
  io::write_file(path, "{}\n");
  CHECK(io::read_file(path) == "{}\n");
  std::filesystem::remove_all(dir.parent_path());
  CHECK(throws_code(ErrorCode::kIo, [&] { io::read_file(path); }));
}

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
#include <string>

#include "decoy/metrics.hpp"
#include "decoy/mdp.hpp"
#include "decoy/observers.hpp"
#include "decoy/planners.hpp"

// JSON documents exchanged by the command line tools. Every reader is strict:
// unknown keys and wrong types raise ParseError. Doubles are written in their
// shortest round-trip form, so write(read(x)) is byte-stable.
namespace decoy::io {

std::string read_file(const std::string& path);
/// Creates parent directories as needed.
void write_file(const std::string& path, const std::string& contents);

std::string mdp_to_json(const TabularMdp& mdp);
TabularMdp mdp_from_json(const std::string& text);

std::string policy_to_json(const AnyPolicy& policy);
AnyPolicy policy_from_json(const std::string& text);

std::string occupancy_to_json(const OccupancyMeasure& rho);
OccupancyMeasure occupancy_from_json(const std::string& text);

struct RewardProvenance {
  std::string kind;
  int iterations = 0;
  std::uint64_t seed = 0;
  double merl_temperature = 1.0;
};

std::string reward_to_json(const RewardTable& reward, const std::optional<RewardProvenance>& provenance = {});
RewardTable reward_from_json(const std::string& text);
std::optional<RewardProvenance> reward_provenance_from_json(const std::string& text);

std::string planner_result_to_json(const PlannerResult& result, const std::string& planner);
std::string recovered_reward_to_json(const RecoveredReward& recovered);
std::string metrics_to_json(const MetricsReport& report);

}  // namespace decoy::io

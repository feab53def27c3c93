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
#include <exception>
#include <optional>
#include <string>
#include <vector>

// The work behind each `decoy` subcommand. Every command reads one JSON
// config, writes its artifacts below `out`, and returns the written paths.
namespace decoy::commands {

struct Options {
  std::string config;
  std::string out;  // empty: "out", or the config's output for bench
  std::optional<std::uint64_t> seed;  // overrides the config's seed
  int jobs = 1;
};

// {"env", "planner", "threshold"} -> plan.json, occupancy.json
std::vector<std::string> plan(const Options& options);
// {"env", "antireward"} -> antireward.json
std::vector<std::string> antireward(const Options& options);
// {"env", "input", "observer", "seed"?} -> recovered.json
std::vector<std::string> observe(const Options& options);
// {"env", "reward", "reference"?, "metrics"?, "ordering_pairs"?, "seed"?} -> metrics.json
std::vector<std::string> evaluate(const Options& options);
// experiment config -> results.csv plus one SVG per (env, planner, anti-reward)
std::vector<std::string> bench(const Options& options);

/// 1 for input and validation problems, 2 for everything else.
int exit_code(const std::exception& e);

}  // namespace decoy::commands

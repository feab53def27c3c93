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

// decoy: planning, anti-reward generation, observation, evaluation and
// benchmark sweeps from JSON configs.

#include <cstdio>
#include <functional>
#include <iostream>
#include <map>

#include <CLI11.hpp>

#include "decoy/commands.hpp"
#include "decoy/error.hpp"

namespace {

using Command = std::function<std::vector<std::string>(const decoy::commands::Options&)>;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deceptive and privacy-preserving planning in tabular MDPs"};
  app.require_subcommand(1);

  decoy::commands::Options options;
  std::uint64_t seed = 0;
  const std::map<std::string, std::pair<std::string, Command>> commands{
      {"plan", {"Plan a policy for one environment and threshold", decoy::commands::plan}},
      {"antireward", {"Generate an anti-reward", decoy::commands::antireward}},
      {"observe", {"Recover a reward from a policy or occupancy", decoy::commands::observe}},
      {"evaluate", {"Compare a recovered reward against the true one", decoy::commands::evaluate}},
      {"bench", {"Run an experiment sweep to CSV and SVG", decoy::commands::bench}},
  };
  std::map<std::string, CLI::App*> subs;
  std::map<std::string, CLI::Option*> seed_opts;
  for (const auto& [name, entry] : commands) {
    CLI::App* sub = app.add_subcommand(name, entry.first);
    sub->add_option("--config", options.config, "JSON config file")->required();
    sub->add_option("--out", options.out, "Output directory");
    seed_opts[name] = sub->add_option("--seed", seed, "Override the config seed");
    sub->add_option("--jobs", options.jobs, "Worker threads")->check(CLI::PositiveNumber);
    subs[name] = sub;
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  for (const auto& [name, sub] : subs) {
    if (!sub->parsed()) continue;
    if (seed_opts[name]->count() > 0) options.seed = seed;
    try {
      for (const std::string& path : commands.at(name).second(options)) std::cout << path << "\n";
      return 0;
    } catch (const std::exception& e) {
      std::cerr << "decoy " << name << ": " << e.what() << "\n";
      return decoy::commands::exit_code(e);
    }
  }
  return 1;
}

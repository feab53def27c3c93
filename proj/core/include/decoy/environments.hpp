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

#include <array>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "decoy/mdp.hpp"

namespace decoy {

// Discount shared by the benchmark families unless a spec overrides it.
inline constexpr double kDefaultGamma = 0.9;

/// Grid with one internal vertical and one internal horizontal wall. Rooms are
/// numbered 0 = north-west, 1 = north-east, 2 = south-west, 3 = south-east.
struct FourRoomsSpec {
  int grid_size = 9;
  std::array<double, 4> room_means{1.0, 2.0, 3.0, 4.0};
  std::array<double, 4> room_stddevs{0.5, 0.5, 0.5, 0.5};
  double gamma = kDefaultGamma;
  std::uint64_t seed = 0;
};

struct FrozenLakeSpec {
  int grid_size = 5;
  double hole_fraction = 0.2;
  // 2/3 gives the equal-thirds slippery dynamics.
  double slip = 2.0 / 3.0;
  double gamma = kDefaultGamma;
  std::uint64_t seed = 0;
};

struct RandomMdpSpec {
  int n_states = 30;
  int n_actions = 4;
  double gamma = kDefaultGamma;
  std::uint64_t seed = 0;
};

struct NetSwitchSpec {
  int n_configs = 25;
  int protection_levels = 2;
  double delta = 0.5;
  double protection_prob = 0.5;
  double gamma = kDefaultGamma;
  std::uint64_t seed = 0;
};

using EnvSpec = std::variant<FourRoomsSpec, FrozenLakeSpec, RandomMdpSpec, NetSwitchSpec>;

/// Four Rooms layout details kept alongside the MDP for tests and plots.
struct FourRoomsLayout {
  int grid_size = 0;
  std::vector<int> cell_of_state;  // row * grid_size + col
  std::vector<int> room_of_state;  // -1 for door cells
  std::vector<int> door_states;    // 4 entries
  std::vector<std::array<int, 2>> door_rooms;
};

struct FourRooms {
  TabularMdp mdp;
  FourRoomsLayout layout;
};

struct FrozenLakeLayout {
  int grid_size = 0;
  std::vector<char> is_hole;  // per state (states are all grid cells)
};

struct FrozenLake {
  TabularMdp mdp;
  FrozenLakeLayout layout;
};

FourRooms make_four_rooms_with_layout(const FourRoomsSpec& spec);
TabularMdp make_four_rooms(const FourRoomsSpec& spec);

FrozenLake make_frozen_lake_with_layout(const FrozenLakeSpec& spec);
TabularMdp make_frozen_lake(const FrozenLakeSpec& spec);

TabularMdp make_random_mdp(const RandomMdpSpec& spec);

/// State index for (config, protection) is config * 2 + protection; protection
/// 1 is the high level.
TabularMdp make_net_switch(const NetSwitchSpec& spec);

TabularMdp make_environment(const EnvSpec& spec);
std::string environment_name(const EnvSpec& spec);
EnvSpec with_seed(EnvSpec spec, std::uint64_t seed);

/// Grid-world adjacency helpers; actions are N, E, S, W.
inline constexpr std::array<int, 4> kRowStep{-1, 0, 1, 0};
inline constexpr std::array<int, 4> kColStep{0, 1, 0, -1};

}  // namespace decoy

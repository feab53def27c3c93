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

#include "decoy/environments.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace decoy {

namespace {

double uniform01(std::mt19937_64& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

double normal_draw(std::mt19937_64& rng, double mean, double stddev) {
  if (stddev == 0.0) return mean;
  return std::normal_distribution<double>(mean, stddev)(rng);
}

// Deterministic grid move with walls and borders acting as self-transitions.
int grid_target(int row, int col, int action, int size, const std::vector<int>& state_of_cell) {
  const int r = row + kRowStep[static_cast<std::size_t>(action)];
  const int c = col + kColStep[static_cast<std::size_t>(action)];
  if (r < 0 || c < 0 || r >= size || c >= size) return -1;
  return state_of_cell[static_cast<std::size_t>(r * size + c)];
}

}  // namespace

// ---------------------------------------------------------------------------
// Four Rooms

FourRooms make_four_rooms_with_layout(const FourRoomsSpec& spec) {
  require(spec.grid_size >= 5 && spec.grid_size % 2 == 1, ErrorCode::kInvalidArgument,
          "four rooms grid_size must be odd and >= 5");
  for (double sd : spec.room_stddevs) {
    require(sd >= 0.0, ErrorCode::kInvalidArgument, "room standard deviations must be non-negative");
  }
  const int g = spec.grid_size;
  const int mid = g / 2;
  std::mt19937_64 rng(spec.seed);

  // Door positions: one per wall segment, chosen along the segment.
  std::uniform_int_distribution<int> along(0, mid - 1);
  const int door_north = along(rng);            // row on vertical wall, rooms 0|1
  const int door_south = mid + 1 + along(rng);  // row on vertical wall, rooms 2|3
  const int door_west = along(rng);             // col on horizontal wall, rooms 0|2
  const int door_east = mid + 1 + along(rng);   // col on horizontal wall, rooms 1|3

  auto room_of_cell = [&](int r, int c) -> int {
    if (r == mid || c == mid) return -1;
    return (r < mid ? 0 : 2) + (c < mid ? 0 : 1);
  };
  auto is_open = [&](int r, int c) {
    if (r != mid && c != mid) return true;
    if (c == mid && r != mid) return r == door_north || r == door_south;
    if (r == mid && c != mid) return c == door_west || c == door_east;
    return false;
  };

  FourRoomsLayout layout;
  layout.grid_size = g;
  std::vector<int> state_of_cell(static_cast<std::size_t>(g * g), -1);
  for (int r = 0; r < g; ++r) {
    for (int c = 0; c < g; ++c) {
      if (!is_open(r, c)) continue;
      state_of_cell[static_cast<std::size_t>(r * g + c)] = static_cast<int>(layout.cell_of_state.size());
      layout.cell_of_state.push_back(r * g + c);
      layout.room_of_state.push_back(room_of_cell(r, c));
    }
  }
  const int n = static_cast<int>(layout.cell_of_state.size());
  const std::array<std::array<int, 2>, 4> door_cells{{{door_north, mid}, {door_south, mid}, {mid, door_west}, {mid, door_east}}};
  const std::array<std::array<int, 2>, 4> door_rooms{{{0, 1}, {2, 3}, {0, 2}, {1, 3}}};
  for (std::size_t i = 0; i < 4; ++i) {
    layout.door_states.push_back(state_of_cell[static_cast<std::size_t>(door_cells[i][0] * g + door_cells[i][1])]);
    layout.door_rooms.push_back(door_rooms[i]);
  }

  Matrix transition = Matrix::Zero(static_cast<Eigen::Index>(n) * 4, n);
  for (int s = 0; s < n; ++s) {
    const int r = layout.cell_of_state[static_cast<std::size_t>(s)] / g;
    const int c = layout.cell_of_state[static_cast<std::size_t>(s)] % g;
    for (int a = 0; a < 4; ++a) {
      const int t = grid_target(r, c, a, g, state_of_cell);
      transition(s * 4 + a, t < 0 ? s : t) = 1.0;
    }
  }

  // Door cells take their reward from the lower-numbered room they join.
  Vector state_reward(n);
  for (int s = 0; s < n; ++s) {
    int room = layout.room_of_state[static_cast<std::size_t>(s)];
    if (room < 0) {
      const auto it = std::find(layout.door_states.begin(), layout.door_states.end(), s);
      room = layout.door_rooms[static_cast<std::size_t>(it - layout.door_states.begin())][0];
    }
    const auto ri = static_cast<std::size_t>(room);
    state_reward(s) = normal_draw(rng, spec.room_means[ri], spec.room_stddevs[ri]);
  }

  std::array<int, 4> room_size{};
  for (int room : layout.room_of_state) {
    if (room >= 0) ++room_size[static_cast<std::size_t>(room)];
  }
  Vector mu = Vector::Zero(n);
  for (int s = 0; s < n; ++s) {
    const int room = layout.room_of_state[static_cast<std::size_t>(s)];
    if (room >= 0) mu(s) = 0.25 / room_size[static_cast<std::size_t>(room)];
  }

  TabularMdp mdp(n, 4, std::move(transition), RewardTable::from_state_rewards(state_reward, 4), spec.gamma,
                 std::move(mu));
  return {std::move(mdp), std::move(layout)};
}

TabularMdp make_four_rooms(const FourRoomsSpec& spec) { return make_four_rooms_with_layout(spec).mdp; }

// ---------------------------------------------------------------------------
// Frozen Lake

FrozenLake make_frozen_lake_with_layout(const FrozenLakeSpec& spec) {
  require(spec.grid_size >= 3, ErrorCode::kInvalidArgument, "frozen lake grid_size must be >= 3");
  require(spec.hole_fraction >= 0.0 && spec.hole_fraction <= 0.4, ErrorCode::kInvalidArgument,
          "hole_fraction must lie in [0, 0.4]");
  require(spec.slip >= 0.0 && spec.slip <= 1.0, ErrorCode::kInvalidArgument, "slip must lie in [0,1]");
  const int g = spec.grid_size;
  const int n = g * g;
  const int n_holes = static_cast<int>(std::floor(spec.hole_fraction * n));
  std::mt19937_64 rng(spec.seed);

  std::vector<int> identity(static_cast<std::size_t>(n));
  std::iota(identity.begin(), identity.end(), 0);

  for (int attempt = 0; attempt < 1000; ++attempt) {
    std::vector<int> cells = identity;
    std::shuffle(cells.begin(), cells.end(), rng);
    std::vector<char> hole(static_cast<std::size_t>(n), 0);
    for (int i = 0; i < n_holes; ++i) hole[static_cast<std::size_t>(cells[static_cast<std::size_t>(i)])] = 1;

    Matrix transition = Matrix::Zero(static_cast<Eigen::Index>(n) * 4, n);
    for (int s = 0; s < n; ++s) {
      if (hole[static_cast<std::size_t>(s)]) {
        for (int a = 0; a < 4; ++a) transition(s * 4 + a, s) = 1.0;
        continue;
      }
      const int r = s / g;
      const int c = s % g;
      for (int a = 0; a < 4; ++a) {
        const std::array<std::pair<int, double>, 3> outcomes{
            {{a, 1.0 - spec.slip}, {(a + 1) % 4, spec.slip / 2.0}, {(a + 3) % 4, spec.slip / 2.0}}};
        for (const auto& [dir, prob] : outcomes) {
          if (prob == 0.0) continue;
          int rr = r + kRowStep[static_cast<std::size_t>(dir)];
          int cc = c + kColStep[static_cast<std::size_t>(dir)];
          if (rr < 0 || cc < 0 || rr >= g || cc >= g) {
            rr = r;
            cc = c;
          }
          transition(s * 4 + a, rr * g + cc) += prob;
        }
      }
    }

    Vector state_reward(n);
    Vector mu = Vector::Zero(n);
    const int n_free = n - n_holes;
    for (int s = 0; s < n; ++s) {
      if (hole[static_cast<std::size_t>(s)]) {
        state_reward(s) = -1.0;
      } else {
        state_reward(s) = uniform01(rng);
        mu(s) = 1.0 / n_free;
      }
    }
    TabularMdp mdp(n, 4, std::move(transition), RewardTable::from_state_rewards(state_reward, 4), spec.gamma,
                   std::move(mu));
    // Redraw layouts in which some hole is walled in by other holes.
    if (validate_mdp(mdp).ok()) {
      return {std::move(mdp), FrozenLakeLayout{g, std::move(hole)}};
    }
  }
  throw Error(ErrorCode::kInvalidArgument, "could not place holes with every state reachable");
}

TabularMdp make_frozen_lake(const FrozenLakeSpec& spec) { return make_frozen_lake_with_layout(spec).mdp; }

// ---------------------------------------------------------------------------
// Random MDP

TabularMdp make_random_mdp(const RandomMdpSpec& spec) {
  require(spec.n_states >= 28 && spec.n_states <= 40, ErrorCode::kInvalidArgument, "n_states must lie in [28,40]");
  require(spec.n_actions >= 2 && spec.n_actions <= 15, ErrorCode::kInvalidArgument, "n_actions must lie in [2,15]");
  const int n = spec.n_states;
  const int m = spec.n_actions;
  std::mt19937_64 rng(spec.seed);
  // Flat Dirichlet rows via normalized unit-rate exponentials.
  Matrix transition(static_cast<Eigen::Index>(n) * m, n);
  for (Eigen::Index row = 0; row < transition.rows(); ++row) {
    for (int t = 0; t < n; ++t) transition(row, t) = -std::log(1.0 - uniform01(rng));
    transition.row(row) /= transition.row(row).sum();
  }
  Vector state_reward(n);
  for (int s = 0; s < n; ++s) state_reward(s) = 2.0 * uniform01(rng) - 1.0;
  Vector mu = Vector::Zero(n);
  mu(0) = 1.0;
  return TabularMdp(n, m, std::move(transition), RewardTable::from_state_rewards(state_reward, m), spec.gamma,
                    std::move(mu));
}

// ---------------------------------------------------------------------------
// Network configuration switching

TabularMdp make_net_switch(const NetSwitchSpec& spec) {
  require(spec.n_configs >= 2, ErrorCode::kInvalidArgument, "n_configs must be >= 2");
  require(spec.protection_levels == 2, ErrorCode::kInvalidArgument, "exactly two protection levels are supported");
  require(spec.delta >= 0.0, ErrorCode::kInvalidArgument, "delta must be non-negative");
  require(spec.protection_prob >= 0.0 && spec.protection_prob <= 1.0, ErrorCode::kInvalidArgument,
          "protection_prob must lie in [0,1]");
  const int configs = spec.n_configs;
  const int n = 2 * configs;
  const int m = configs;
  std::mt19937_64 rng(spec.seed);
  Vector value(configs);
  for (int c = 0; c < configs; ++c) value(c) = uniform01(rng);

  Matrix transition = Matrix::Zero(static_cast<Eigen::Index>(n) * m, n);
  for (int s = 0; s < n; ++s) {
    for (int j = 0; j < m; ++j) {
      transition(s * m + j, 2 * j + 1) = spec.protection_prob;
      transition(s * m + j, 2 * j) = 1.0 - spec.protection_prob;
    }
  }
  Vector state_reward(n);
  for (int c = 0; c < configs; ++c) {
    state_reward(2 * c) = value(c) - spec.delta;
    state_reward(2 * c + 1) = value(c);
  }
  return TabularMdp(n, m, std::move(transition), RewardTable::from_state_rewards(state_reward, m), spec.gamma,
                    Vector::Constant(n, 1.0 / n));
}

// ---------------------------------------------------------------------------

TabularMdp make_environment(const EnvSpec& spec) {
  return std::visit(
      [](const auto& s) -> TabularMdp {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, FourRoomsSpec>) return make_four_rooms(s);
        else if constexpr (std::is_same_v<T, FrozenLakeSpec>) return make_frozen_lake(s);
        else if constexpr (std::is_same_v<T, RandomMdpSpec>) return make_random_mdp(s);
        else return make_net_switch(s);
      },
      spec);
}

std::string environment_name(const EnvSpec& spec) {
  return std::visit(
      [](const auto& s) -> std::string {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, FourRoomsSpec>) return "four_rooms_" + std::to_string(s.grid_size);
        else if constexpr (std::is_same_v<T, FrozenLakeSpec>) return "frozen_lake_" + std::to_string(s.grid_size);
        else if constexpr (std::is_same_v<T, RandomMdpSpec>) return "random_mdp";
        else return "net_switch";
      },
      spec);
}

EnvSpec with_seed(EnvSpec spec, std::uint64_t seed) {
  std::visit([seed](auto& s) { s.seed = seed; }, spec);
  return spec;
}

}  // namespace decoy

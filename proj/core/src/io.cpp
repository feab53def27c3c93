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

#include "decoy/io.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "json_util.hpp"

namespace decoy::io {

using detail::Json;
using detail::ObjectReader;

namespace {

constexpr int kIndent = 2;

std::string dump(const Json& j) { return j.dump(kIndent) + "\n"; }

Json policy_json(const AnyPolicy& policy) {
  Json out;
  if (const auto* p = std::get_if<StochasticPolicy>(&policy)) {
    out["type"] = "stochastic";
    out["probs"] = detail::matrix_to_json(p->probs());
  } else {
    const auto& mixed = std::get<MixedPolicy>(policy);
    out["type"] = "mixed";
    out["weights"] = detail::vector_to_json(mixed.weights());
    Json members = Json::array();
    for (const auto& m : mixed.members()) members.push_back(detail::matrix_to_json(m.probs()));
    out["members"] = std::move(members);
  }
  return out;
}

AnyPolicy policy_from(const Json& j, const std::string& path) {
  ObjectReader in(j, path);
  const std::string type = in.string("type");
  if (type == "stochastic") {
    StochasticPolicy p(detail::matrix_from_json(in.at("probs"), in.child("probs")));
    in.finish();
    return p;
  }
  if (type == "mixed") {
    const Vector weights = detail::vector_from_json(in.at("weights"), in.child("weights"));
    const Json& members_json = in.at("members");
    if (!members_json.is_array()) detail::type_error(in.child("members"), "array", members_json);
    std::vector<StochasticPolicy> members;
    for (std::size_t i = 0; i < members_json.size(); ++i) {
      members.emplace_back(
          detail::matrix_from_json(members_json[i], in.child("members") + "[" + std::to_string(i) + "]"));
    }
    in.finish();
    return MixedPolicy(std::move(members), weights);
  }
  throw Error(ErrorCode::kParseError, in.child("type") + ": unknown policy type '" + type + "'");
}

}  // namespace

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorCode::kIo, "cannot open '" + path + "' for reading");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const std::string& path, const std::string& contents) {
  const std::filesystem::path p(path);
  std::error_code ec;
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path(), ec);
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  require(static_cast<bool>(out), ErrorCode::kIo, "cannot open '" + path + "' for writing");
  out << contents;
  out.flush();
  require(static_cast<bool>(out), ErrorCode::kIo, "failed writing '" + path + "'");
}

std::string mdp_to_json(const TabularMdp& mdp) {
  Json out;
  out["n_states"] = mdp.n_states();
  out["n_actions"] = mdp.n_actions();
  out["gamma"] = mdp.gamma();
  Json transition = Json::array();
  for (int s = 0; s < mdp.n_states(); ++s) {
    Json per_action = Json::array();
    for (int a = 0; a < mdp.n_actions(); ++a) {
      per_action.push_back(detail::vector_to_json(mdp.next_state_row(s, a).transpose()));
    }
    transition.push_back(std::move(per_action));
  }
  out["transition"] = std::move(transition);
  out["reward"] = detail::matrix_to_json(mdp.reward().values());
  out["initial_dist"] = detail::vector_to_json(mdp.initial_dist());
  return dump(out);
}

TabularMdp mdp_from_json(const std::string& text) {
  const Json j = detail::parse_json(text, "mdp");
  ObjectReader in(j, "mdp");
  const int n = in.integer("n_states");
  const int m = in.integer("n_actions");
  require(n >= 1 && m >= 1, ErrorCode::kParseError, "mdp: n_states and n_actions must be positive");
  const double gamma = in.number("gamma");
  const Json& tj = in.at("transition");
  if (!tj.is_array() || tj.size() != static_cast<std::size_t>(n)) {
    throw Error(ErrorCode::kParseError, "mdp.transition: expected " + std::to_string(n) + " states");
  }
  Matrix transition(static_cast<Eigen::Index>(n) * m, n);
  for (int s = 0; s < n; ++s) {
    const std::string path = "mdp.transition[" + std::to_string(s) + "]";
    const Matrix rows = detail::matrix_from_json(tj[static_cast<std::size_t>(s)], path);
    require(rows.rows() == m && rows.cols() == n, ErrorCode::kParseError, path + ": expected " +
                                                                             std::to_string(m) + "x" +
                                                                             std::to_string(n));
    transition.middleRows(static_cast<Eigen::Index>(s) * m, m) = rows;
  }
  RewardTable reward(detail::matrix_from_json(in.at("reward"), "mdp.reward"));
  const Vector initial = detail::vector_from_json(in.at("initial_dist"), "mdp.initial_dist");
  in.finish();
  return TabularMdp(n, m, std::move(transition), std::move(reward), gamma, initial);
}

std::string policy_to_json(const AnyPolicy& policy) { return dump(policy_json(policy)); }

AnyPolicy policy_from_json(const std::string& text) {
  return policy_from(detail::parse_json(text, "policy"), "policy");
}

std::string occupancy_to_json(const OccupancyMeasure& rho) {
  Json out;
  out["rho"] = detail::matrix_to_json(rho.rho());
  return dump(out);
}

OccupancyMeasure occupancy_from_json(const std::string& text) {
  const Json j = detail::parse_json(text, "occupancy");
  ObjectReader in(j, "occupancy");
  OccupancyMeasure rho(detail::matrix_from_json(in.at("rho"), "occupancy.rho"));
  in.finish();
  return rho;
}

std::string reward_to_json(const RewardTable& reward, const std::optional<RewardProvenance>& provenance) {
  Json out;
  if (provenance) {
    Json p;
    p["kind"] = provenance->kind;
    p["iterations"] = provenance->iterations;
    p["seed"] = provenance->seed;
    p["merl_temperature"] = provenance->merl_temperature;
    out["provenance"] = std::move(p);
  }
  out["reward"] = detail::matrix_to_json(reward.values());
  return dump(out);
}

namespace {

struct RewardDoc {
  RewardTable reward;
  std::optional<RewardProvenance> provenance;
};

RewardDoc parse_reward_doc(const std::string& text) {
  const Json j = detail::parse_json(text, "reward");
  ObjectReader in(j, "reward");
  RewardDoc doc;
  doc.reward = RewardTable(detail::matrix_from_json(in.at("reward"), "reward.reward"));
  if (const Json* p = in.find("provenance")) {
    ObjectReader pin(*p, "reward.provenance");
    RewardProvenance prov;
    prov.kind = pin.string("kind");
    prov.iterations = pin.integer("iterations");
    prov.seed = detail::as_unsigned(pin.at("seed"), pin.child("seed"));
    prov.merl_temperature = pin.number("merl_temperature");
    pin.finish();
    doc.provenance = prov;
  }
  if (const Json* irl = in.find("irl")) {
    // Convergence metadata written by the observer; only checked for shape.
    ObjectReader iin(*irl, "reward.irl");
    detail::as_number(iin.at("final_occupancy_gap"), iin.child("final_occupancy_gap"));
    detail::as_integer(iin.at("iterations_used"), iin.child("iterations_used"));
    iin.boolean_or("converged", false);
    iin.finish();
  }
  in.finish();
  return doc;
}

}  // namespace

RewardTable reward_from_json(const std::string& text) { return parse_reward_doc(text).reward; }

std::optional<RewardProvenance> reward_provenance_from_json(const std::string& text) {
  return parse_reward_doc(text).provenance;
}

std::string planner_result_to_json(const PlannerResult& result, const std::string& planner) {
  Json out;
  out["planner"] = planner;
  out["e_min"] = result.e_min;
  out["lambda_star"] = result.lambda_star;
  out["achieved_return"] = result.achieved_return;
  out["achieved_objective"] = result.achieved_objective;
  out["constraint_deviation"] = result.constraint_deviation();
  out["iterations"] = result.iterations;
  out["converged"] = result.converged;
  out["policy"] = policy_json(result.policy);
  return dump(out);
}

std::string recovered_reward_to_json(const RecoveredReward& recovered) {
  Json out;
  Json irl;
  irl["final_occupancy_gap"] = recovered.final_occupancy_gap;
  irl["iterations_used"] = recovered.iterations_used;
  irl["converged"] = recovered.converged;
  out["irl"] = std::move(irl);
  out["reward"] = detail::matrix_to_json(recovered.reward.values());
  return dump(out);
}

std::string metrics_to_json(const MetricsReport& report) {
  auto field = [](const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); };
  Json out;
  out["pearson"] = field(report.pearson);
  out["epic"] = field(report.epic);
  out["rollout_return"] = field(report.rollout_return);
  out["rollout_ratio"] = field(report.rollout_ratio);
  out["ordering_consistency"] = field(report.ordering_consistency);
  return dump(out);
}

}  // namespace decoy::io

// Copyright 2026 The pontus-mpemba Authors
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

// Scenario configuration files: JSON text with complex numbers written as
// explicit [re, im] pairs.

#include <json.hpp>

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "pme/bloch.hpp"
#include "pme/error.hpp"
#include "pme/protocol.hpp"

namespace pme::io {

using Json = nlohmann::json;

struct EnvironmentConfig {
  std::string name;
  CMat3 kossakowski = CMat3::Zero();
  Vec3 h = Vec3::Zero();
  std::optional<BlochState> declared_steady_state;

  Environment environment() const { return bloch::qubit_environment(kossakowski, h); }
};

struct ScenarioConfig {
  std::string name;
  std::vector<EnvironmentConfig> environments;
  std::string target;
  std::string auxiliary;
  BlochState initial_state;
  double epsilon = dynamics::kDefaultEpsilon;
  double t_max = dynamics::kDefaultTMax;
  ToleranceSpec tol;
  std::optional<double> t_SI;
  std::vector<double> sweep_grid;
  std::string output_dir;

  const EnvironmentConfig& environment(const std::string& env_name) const {
    for (const auto& e : environments)
      if (e.name == env_name) return e;
    throw Error(ErrorCode::ConfigError, "unknown environment '" + env_name + "'");
  }
};

namespace detail {

[[noreturn]] inline void fail(const std::string& where, const std::string& what) {
  throw Error(ErrorCode::ConfigError, where + ": " + what);
}

inline double number(const Json& j, const std::string& where) {
  if (!j.is_number()) fail(where, "expected a number");
  return j.get<double>();
}

inline Vec3 vec3(const Json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 3) fail(where, "expected an array of 3 numbers");
  return Vec3(number(j[0], where), number(j[1], where), number(j[2], where));
}

inline Complex complex_pair(const Json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    fail(where, "complex entries must be [re, im] pairs of numbers");
  return {j[0].get<double>(), j[1].get<double>()};
}

inline CMat3 complex_matrix3(const Json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 3) fail(where, "expected 3 rows");
  CMat3 m;
  for (int r = 0; r < 3; ++r) {
    const auto& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || row.size() != 3) fail(where, "row " + std::to_string(r) + " must have 3 entries");
    for (int c = 0; c < 3; ++c)
      m(r, c) = complex_pair(row[static_cast<std::size_t>(c)],
                             where + "[" + std::to_string(r) + "][" + std::to_string(c) + "]");
  }
  return m;
}

inline std::vector<double> sweep_grid(const Json& j) {
  std::vector<double> grid;
  if (j.contains("values")) {
    if (!j["values"].is_array()) fail("sweep.values", "expected an array");
    for (const auto& v : j["values"]) grid.push_back(number(v, "sweep.values"));
  } else if (j.contains("start") || j.contains("stop") || j.contains("count")) {
    const double start = number(j.value("start", Json()), "sweep.start");
    const double stop = number(j.value("stop", Json()), "sweep.stop");
    const Json& count_json = j.value("count", Json());
    if (!count_json.is_number_integer() || count_json.get<long>() < 1) fail("sweep.count", "expected a positive integer");
    const long count = count_json.get<long>();
    for (long i = 0; i < count; ++i)
      grid.push_back(count == 1 ? start : start + (stop - start) * static_cast<double>(i) / static_cast<double>(count - 1));
  }
  return grid;
}

}  // namespace detail

inline ScenarioConfig parse_config(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text, nullptr, true, true);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::ConfigError, std::string("malformed config: ") + e.what());
  }
  if (!j.is_object()) detail::fail("config", "top level must be an object");

  ScenarioConfig cfg;
  cfg.name = j.value("name", std::string("scenario"));
  if (!j.contains("environments") || !j["environments"].is_object())
    detail::fail("environments", "missing or not an object");
  for (const auto& [env_name, e] : j["environments"].items()) {
    const std::string where = "environments." + env_name;
    EnvironmentConfig env;
    env.name = env_name;
    if (!e.contains("kossakowski")) detail::fail(where, "missing kossakowski");
    env.kossakowski = detail::complex_matrix3(e["kossakowski"], where + ".kossakowski");
    if (e.contains("h")) env.h = detail::vec3(e["h"], where + ".h");
    if (e.contains("steady_state"))
      env.declared_steady_state = BlochState(detail::vec3(e["steady_state"], where + ".steady_state"));
    cfg.environments.push_back(std::move(env));
  }
  if (cfg.environments.empty()) detail::fail("environments", "at least one environment is required");

  cfg.target = j.value("target", std::string("F"));
  cfg.auxiliary = j.value("auxiliary", std::string("A"));
  if (j.contains("initial_state")) cfg.initial_state = BlochState(detail::vec3(j["initial_state"], "initial_state"));
  if (j.contains("epsilon")) cfg.epsilon = detail::number(j["epsilon"], "epsilon");
  if (j.contains("t_max")) cfg.t_max = detail::number(j["t_max"], "t_max");
  if (j.contains("tolerances")) {
    const auto& t = j["tolerances"];
    if (t.contains("abs")) cfg.tol.abs = detail::number(t["abs"], "tolerances.abs");
    if (t.contains("rel")) cfg.tol.rel = detail::number(t["rel"], "tolerances.rel");
  }
  if (j.contains("t_SI")) cfg.t_SI = detail::number(j["t_SI"], "t_SI");
  if (j.contains("sweep")) cfg.sweep_grid = detail::sweep_grid(j["sweep"]);
  cfg.output_dir = j.value("output_dir", std::string());
  if (!(cfg.epsilon > 0.0)) detail::fail("epsilon", "must be positive");
  if (!(cfg.t_max > 0.0)) detail::fail("t_max", "must be positive");
  return cfg;
}

inline ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ConfigError, "cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

/// Scenario for the configured target/auxiliary pair; physics checks are
/// left to the protocol layer.
inline protocol::Scenario to_scenario(const ScenarioConfig& cfg) {
  const auto& f = cfg.environment(cfg.target);
  const auto& a = cfg.environment(cfg.auxiliary);
  protocol::Scenario s{f.environment(), a.environment(), cfg.initial_state, cfg.epsilon, cfg.t_SI.value_or(0.0),
                       cfg.t_max, cfg.tol, f.declared_steady_state, a.declared_steady_state};
  return s;
}

}  // namespace pme::io

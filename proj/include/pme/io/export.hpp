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

// CSV and JSON exports. CSV: comma separated, header row, LF endings,
// numbers printed with 17 significant digits.

#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "pme/dynamics.hpp"
#include "pme/error.hpp"
#include "pme/field.hpp"
#include "pme/protocol.hpp"

namespace pme::io {

using OrderedJson = nlohmann::ordered_json;

inline std::string format_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline void write_trajectory_header(std::ostream& os) { os << "t,r1,r2,r3,D_T_to_F,v\n"; }

/// Rows of a monitored trajectory; `skip_first` drops the opening sample
/// when appending a leg that starts where the previous one ended.
inline void write_trajectory_rows(std::ostream& os, const dynamics::MonitorSeries& series, bool skip_first = false) {
  const auto& traj = series.trajectory;
  for (std::size_t i = skip_first ? 1 : 0; i < traj.size(); ++i) {
    const BlochState r = traj.state(i);
    os << format_number(traj.times()[i]) << ',' << format_number(r.r(0)) << ',' << format_number(r.r(1)) << ','
       << format_number(r.r(2)) << ',' << format_number(series.values[i]) << ','
       << format_number(dynamics::scalar_velocity(r, traj.generator)) << '\n';
  }
}

inline void write_field_csv(std::ostream& os, const field::FieldGrid& grid) {
  os << "r1,r2,v1,v2,vmag,dir1,dir2\n";
  for (std::size_t i = 0; i < grid.points.size(); ++i) {
    const auto dir = grid.direction(i);
    os << format_number(grid.points[i](0)) << ',' << format_number(grid.points[i](1)) << ','
       << format_number(grid.vectors[i](0)) << ',' << format_number(grid.vectors[i](1)) << ','
       << format_number(grid.magnitudes[i]) << ',' << format_number(dir(0)) << ',' << format_number(dir(1)) << '\n';
  }
}

inline OrderedJson optional_number(const std::optional<double>& x) { return x ? OrderedJson(*x) : OrderedJson(nullptr); }

inline OrderedJson bloch_json(const BlochState& s) { return OrderedJson::array({s.r(0), s.r(1), s.r(2)}); }

/// Summary of one two-step run. The first eight keys are the stable core;
/// the distances after them are enough to re-derive the PME type.
inline OrderedJson summary_json(const protocol::ProtocolResult& r, const std::string& name = {}) {
  OrderedJson j;
  j["t_SF"] = r.t_SF;
  j["t_SA"] = optional_number(r.t_SA);
  j["t_SI"] = r.t_SI;
  j["t_IF"] = r.t_IF;
  j["case"] = std::string(protocol::to_string(r.case_label));
  j["pme_type"] = std::string(protocol::to_string(r.pme_type));
  j["pme_occurs"] = r.pme_occurs;
  j["epsilon"] = r.epsilon;
  j["d_SF"] = r.d_SF;
  j["d_A_at_tSI"] = r.d_A_at_tSI;
  j["d_F_at_tSI"] = r.d_F_at_tSI;
  j["t_M"] = r.analysis.first_minimum ? OrderedJson(r.analysis.first_minimum->time) : OrderedJson(nullptr);
  j["crossing_time"] = optional_number(r.analysis.crossing);
  j["copies_crossing_time"] = optional_number(r.copies_crossing);
  j["initial_derivative_aux"] = r.analysis.initial_derivative_aux;
  j["initial_derivative_target"] = r.analysis.initial_derivative_target;
  j["r_S"] = bloch_json(r.direct.trajectory.state(0));
  j["r_F"] = bloch_json(r.r_F);
  j["r_A"] = bloch_json(r.r_A);
  j["r_I"] = bloch_json(r.r_I);
  if (!name.empty()) j["scenario"] = name;
  return j;
}

inline void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::ConfigError, "cannot write '" + path.string() + "'");
  out << content;
}

inline std::string dump_json(const OrderedJson& j) { return j.dump(2) + "\n"; }

}  // namespace pme::io

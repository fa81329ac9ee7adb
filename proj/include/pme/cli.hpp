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

// Command dispatch for the `pme` tool: validate | protocol | sweep | field.
//
// Exit codes: 0 success, 2 usage/parse/configuration error, 3 physics
// validation failure, 4 numerical failure (no convergence, step underflow).
// Failures also print a one-line JSON error record on stderr.

#include <CLI11.hpp>

#include <filesystem>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "pme/bloch.hpp"
#include "pme/error.hpp"
#include "pme/field.hpp"
#include "pme/io/config.hpp"
#include "pme/io/export.hpp"
#include "pme/lindblad.hpp"
#include "pme/protocol.hpp"

namespace pme::cli {

enum ExitCode : int { kOk = 0, kInternal = 1, kUsage = 2, kPhysics = 3, kNumerical = 4 };

inline int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::ConfigError:
    case ErrorCode::DimensionMismatch:
    case ErrorCode::InvalidSwitchTime:
      return kUsage;
    case ErrorCode::NoConvergence:
    case ErrorCode::StepSizeUnderflow:
    case ErrorCode::DegenerateReference:
      return kNumerical;
    default:
      return kPhysics;
  }
}

struct Options {
  std::string config_path;
  std::string out_dir;
  std::optional<double> epsilon;
  std::optional<double> t_SI;
  std::string env_name;
  int resolution = field::kDefaultResolution;
};

namespace detail {

inline std::filesystem::path output_dir(const io::ScenarioConfig& cfg, const Options& opt) {
  std::filesystem::path dir = std::filesystem::path("out") / cfg.name;
  if (!opt.out_dir.empty()) {
    dir = opt.out_dir;
  } else if (!cfg.output_dir.empty()) {
    dir = cfg.output_dir;
  }
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::string vec_text(const Vec3& v) {
  return io::format_number(v(0)) + " " + io::format_number(v(1)) + " " + io::format_number(v(2));
}

}  // namespace detail

inline int cmd_validate(const io::ScenarioConfig& cfg, std::ostream& out) {
  bool all_valid = true;
  for (const auto& ec : cfg.environments) {
    const Environment env = ec.environment();
    const auto report = lindblad::validate_environment(env);
    out << "environment " << ec.name << "\n";
    out << "  hamiltonian_hermiticity " << io::format_number(report.hamiltonian_hermiticity) << "\n";
    out << "  kossakowski_hermiticity " << io::format_number(report.kossakowski_hermiticity) << "\n";
    out << "  min_kossakowski_eigenvalue " << io::format_number(report.min_kossakowski_eigenvalue) << "\n";
    out << "  accepted " << (report.accepted ? "true" : "false");
    if (report.failure) out << " (" << to_string(*report.failure) << ")";
    out << "\n";
    if (!report.accepted) {
      all_valid = false;
      continue;
    }
    out << "  plane_condition " << (bloch::plane_condition_check(env) ? "true" : "false") << "\n";
    try {
      const BlochState steady = bloch::bloch_map(lindblad::steady_state(env));
      out << "  steady_state " << detail::vec_text(steady.r) << "\n";
      if (ec.declared_steady_state) {
        const double dev = (steady.r - ec.declared_steady_state->r).norm();
        const bool ok = dev <= protocol::kDeclaredStateTolerance;
        out << "  declared_steady_state " << detail::vec_text(ec.declared_steady_state->r) << " deviation "
            << io::format_number(dev) << (ok ? " ok" : " MISMATCH") << "\n";
        all_valid = all_valid && ok;
      }
    } catch (const Error& e) {
      out << "  steady_state none (" << to_string(e.code()) << ")\n";
      if (ec.declared_steady_state) all_valid = false;
    }
  }
  out << "result " << (all_valid ? "valid" : "invalid") << "\n";
  return all_valid ? kOk : kPhysics;
}

inline int cmd_protocol(const io::ScenarioConfig& cfg, const Options& opt, std::ostream& out) {
  auto scenario = io::to_scenario(cfg);
  if (opt.epsilon) scenario.epsilon = *opt.epsilon;
  const auto t_SI = opt.t_SI ? opt.t_SI : cfg.t_SI;
  if (!t_SI) throw Error(ErrorCode::ConfigError, "no t_SI given in config or on the command line");
  scenario.t_SI = *t_SI;

  const auto result = protocol::run_two_step(scenario);
  const auto dir = detail::output_dir(cfg, opt);

  std::ostringstream direct, aux, two_step;
  io::write_trajectory_header(direct);
  io::write_trajectory_rows(direct, result.direct);
  io::write_trajectory_header(aux);
  io::write_trajectory_rows(aux, result.auxiliary);
  io::write_trajectory_header(two_step);
  io::write_trajectory_rows(two_step, result.switch_leg);
  io::write_trajectory_rows(two_step, result.relax_leg, true);
  io::write_text_file(dir / "direct.csv", direct.str());
  io::write_text_file(dir / "auxiliary.csv", aux.str());
  io::write_text_file(dir / "two_step.csv", two_step.str());
  io::write_text_file(dir / "summary.json", io::dump_json(io::summary_json(result, cfg.name)));

  out << "case " << protocol::to_string(result.case_label) << "\n"
      << "pme_type " << protocol::to_string(result.pme_type) << "\n"
      << "pme_occurs " << (result.pme_occurs ? "true" : "false") << "\n"
      << "t_SF " << io::format_number(result.t_SF) << "\n"
      << "t_SI " << io::format_number(result.t_SI) << "\n"
      << "t_IF " << io::format_number(result.t_IF) << "\n"
      << "wrote " << dir.string() << "\n";
  return kOk;
}

inline int cmd_sweep(const io::ScenarioConfig& cfg, const Options& opt, std::ostream& out) {
  auto scenario = io::to_scenario(cfg);
  if (opt.epsilon) scenario.epsilon = *opt.epsilon;
  if (cfg.sweep_grid.empty()) throw Error(ErrorCode::ConfigError, "empty sweep grid");

  const auto sweep = protocol::sweep_tSI(scenario, cfg.sweep_grid);
  const auto dir = detail::output_dir(cfg, opt);

  std::ostringstream csv;
  csv << "t_SI,t_IF,total,pme_type,pme_occurs,case,status\n";
  std::size_t failed = 0;
  for (const auto& p : sweep.points) {
    csv << io::format_number(p.t_SI) << ',';
    if (p.ok()) {
      const auto& r = *p.result;
      csv << io::format_number(r.t_IF) << ',' << io::format_number(p.total()) << ',' << protocol::to_string(r.pme_type)
          << ',' << (r.pme_occurs ? "true" : "false") << ',' << protocol::to_string(r.case_label) << ",ok\n";
    } else {
      ++failed;
      std::string status = p.error.substr(0, p.error.find(':'));
      csv << ",,,,," << status << "\n";
    }
  }
  io::write_text_file(dir / "sweep.csv", csv.str());

  io::OrderedJson j;
  if (sweep.argmin) {
    const auto& best = sweep.points[*sweep.argmin];
    j["t_SI"] = best.t_SI;
    j["t_IF"] = best.result->t_IF;
    j["total"] = best.total();
    j["pme_type"] = std::string(protocol::to_string(best.result->pme_type));
    j["pme_occurs"] = best.result->pme_occurs;
    j["t_SF"] = best.result->t_SF;
  } else {
    j["t_SI"] = nullptr;
  }
  j["any_pme"] = sweep.any_pme;
  j["points"] = sweep.points.size();
  j["failed"] = failed;
  j["epsilon"] = scenario.epsilon;
  io::write_text_file(dir / "sweep_argmin.json", io::dump_json(j));

  out << "points " << sweep.points.size() << " failed " << failed << "\n"
      << "any_pme " << (sweep.any_pme ? "true" : "false") << "\n";
  if (sweep.argmin) out << "argmin_t_SI " << io::format_number(sweep.points[*sweep.argmin].t_SI) << "\n";
  out << "wrote " << dir.string() << "\n";
  return kOk;
}

inline int cmd_field(const io::ScenarioConfig& cfg, const Options& opt, std::ostream& out) {
  const std::string name = opt.env_name.empty() ? cfg.target : opt.env_name;
  const auto& ec = cfg.environment(name);
  const auto grid = field::field_grid(ec.environment(), opt.resolution, name);
  const auto dir = detail::output_dir(cfg, opt);
  std::ostringstream csv;
  io::write_field_csv(csv, grid);
  const auto path = dir / ("field_" + name + ".csv");
  io::write_text_file(path, csv.str());
  out << "points " << grid.points.size() << "\n" << "wrote " << path.string() << "\n";
  return kOk;
}

inline void report_error(std::ostream& err, const std::string& code, const std::string& message, int exit_code) {
  io::OrderedJson j;
  j["error"] = code;
  j["message"] = message;
  j["exit_code"] = exit_code;
  err << j.dump() << "\n";
}

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Two-step relaxation protocols for Markovian open quantum systems", "pme"};
  app.require_subcommand(1);
  Options opt;

  auto add_common = [&opt](CLI::App* sub) {
    sub->add_option("--config", opt.config_path, "Scenario config file")->required();
    sub->add_option("--out-dir", opt.out_dir, "Output directory");
  };
  auto* validate = app.add_subcommand("validate", "Check environments and print steady states");
  add_common(validate);
  auto* protocol_cmd = app.add_subcommand("protocol", "Run the direct and two-step protocols");
  add_common(protocol_cmd);
  protocol_cmd->add_option("--epsilon", opt.epsilon, "Convergence cutoff override");
  protocol_cmd->add_option("--t-si", opt.t_SI, "Switch time override");
  auto* sweep = app.add_subcommand("sweep", "Sweep the switch time over the configured grid");
  add_common(sweep);
  sweep->add_option("--epsilon", opt.epsilon, "Convergence cutoff override");
  auto* field_cmd = app.add_subcommand("field", "Sample the velocity field on the unit disk");
  add_common(field_cmd);
  field_cmd->add_option("--env", opt.env_name, "Environment name (default: target)");
  field_cmd->add_option("--resolution", opt.resolution, "Grid points per axis")->check(CLI::Range(2, 100000));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kOk;
    }
    report_error(err, "UsageError", e.what(), kUsage);
    return kUsage;
  }

  std::optional<std::filesystem::path> error_dir;
  try {
    const auto cfg = io::load_config(opt.config_path);
    if (!validate->parsed()) {
      try {
        error_dir = detail::output_dir(cfg, opt);
      } catch (const std::exception&) {
      }
    }
    if (validate->parsed()) return cmd_validate(cfg, out);
    if (protocol_cmd->parsed()) return cmd_protocol(cfg, opt, out);
    if (sweep->parsed()) return cmd_sweep(cfg, opt, out);
    return cmd_field(cfg, opt, out);
  } catch (const Error& e) {
    const int code = exit_code_for(e.code());
    report_error(err, std::string(to_string(e.code())), e.what(), code);
    if (error_dir) {
      io::OrderedJson j;
      j["error"] = std::string(to_string(e.code()));
      j["message"] = e.what();
      j["exit_code"] = code;
      try {
        io::write_text_file(*error_dir / "error.json", io::dump_json(j));
      } catch (const std::exception&) {
      }
    }
    return code;
  } catch (const std::exception& e) {
    report_error(err, "InternalError", e.what(), kInternal);
    return kInternal;
  }
}

}  // namespace pme::cli

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

// Direct and two-step relaxation protocols, case analysis of an
// (target, auxiliary) environment pair, and the PME type classifier.

#include <algorithm>
#include <cmath>
#include <future>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "pme/bloch.hpp"
#include "pme/dynamics.hpp"
#include "pme/error.hpp"
#include "pme/lindblad.hpp"

namespace pme::protocol {

using dynamics::MonitorSeries;
using dynamics::Trajectory;

inline constexpr double kDeclaredStateTolerance = 0.01;
inline constexpr double kClassificationTolerance = 1e-9;

enum class CaseLabel { Case1Crossing, Case1NoCrossing, Case2Monotone, Case3Repelled };
enum class PmeType { None, WeakTypeA, WeakTypeB, Strong };

constexpr std::string_view to_string(CaseLabel label) {
  switch (label) {
    case CaseLabel::Case1Crossing: return "case1_crossing";
    case CaseLabel::Case1NoCrossing: return "case1_no_crossing";
    case CaseLabel::Case2Monotone: return "case2_monotone";
    case CaseLabel::Case3Repelled: return "case3_repelled";
  }
  return "unknown";
}

constexpr std::string_view to_string(PmeType type) {
  switch (type) {
    case PmeType::None: return "none";
    case PmeType::WeakTypeA: return "weak_type_A";
    case PmeType::WeakTypeB: return "weak_type_B";
    case PmeType::Strong: return "strong";
  }
  return "unknown";
}

inline std::optional<CaseLabel> case_label_from_string(std::string_view s) {
  for (auto l : {CaseLabel::Case1Crossing, CaseLabel::Case1NoCrossing, CaseLabel::Case2Monotone,
                 CaseLabel::Case3Repelled})
    if (to_string(l) == s) return l;
  return std::nullopt;
}

inline std::optional<PmeType> pme_type_from_string(std::string_view s) {
  for (auto t : {PmeType::None, PmeType::WeakTypeA, PmeType::WeakTypeB, PmeType::Strong})
    if (to_string(t) == s) return t;
  return std::nullopt;
}

struct Scenario {
  Environment env_F;
  Environment env_A;
  BlochState r_S;
  double epsilon = dynamics::kDefaultEpsilon;
  double t_SI = 0.0;
  double t_max = dynamics::kDefaultTMax;
  ToleranceSpec tol{};
  std::optional<BlochState> declared_F{};
  std::optional<BlochState> declared_A{};
};

struct CaseAnalysis {
  CaseLabel label = CaseLabel::Case2Monotone;
  double initial_derivative_aux = 0.0;     // d/dt D_T(rho_A(t), rho_F) at t = 0
  double initial_derivative_target = 0.0;  // d/dt D_T(rho_F(t), rho_F) at t = 0
  std::optional<dynamics::Extremum> first_minimum;
  std::optional<double> crossing;
};

/// Everything about a scenario that does not depend on the switch time.
struct ProtocolContext {
  explicit ProtocolContext(Scenario s) : scenario(std::move(s)) {}

  Scenario scenario;
  AffineGenerator gen_F;
  AffineGenerator gen_A;
  BlochState r_F;
  BlochState r_A;
  double t_SF = 0.0;
  std::optional<double> t_SA;
  MonitorSeries direct;     // copy 1: S -> F, monitored against F
  MonitorSeries auxiliary;  // S -> A under the auxiliary environment, monitored against F
  CaseAnalysis analysis;
};

struct ProtocolResult {
  double t_SF = 0.0;
  double t_SI = 0.0;
  double t_IF = 0.0;
  std::optional<double> t_SA;
  double epsilon = 0.0;
  CaseLabel case_label = CaseLabel::Case2Monotone;
  PmeType pme_type = PmeType::None;
  bool pme_occurs = false;

  double d_SF = 0.0;
  double d_A_at_tSI = 0.0;
  double d_F_at_tSI = 0.0;
  BlochState r_F;
  BlochState r_A;
  BlochState r_I;
  std::optional<double> copies_crossing;  // first crossing of copy 2 with copy 1 after t_SI

  CaseAnalysis analysis;
  MonitorSeries direct;
  MonitorSeries auxiliary;
  MonitorSeries switch_leg;  // copy 2 on [0, t_SI] under the auxiliary environment
  MonitorSeries relax_leg;   // copy 2 from t_SI under the target environment
};

namespace detail {

inline double initial_derivative(const BlochState& r, const AffineGenerator& gen, const BlochState& ref) {
  if ((r.r - ref.r).norm() < dynamics::kDegenerateReference) return 0.0;
  return dynamics::monitor_derivative(r, gen, ref);
}

}  // namespace detail

inline void validate_scenario(const Scenario& s) {
  lindblad::require_valid(s.env_F);
  lindblad::require_valid(s.env_A);
  if (s.env_F.dim() != 2 || s.env_A.dim() != 2)
    throw Error(ErrorCode::DimensionMismatch, "protocol runs on two-level environments");
  if (!s.r_S.is_physical()) throw Error(ErrorCode::BlochNormExceeded, "initial state outside the Bloch ball");
  if (!(s.epsilon > 0.0)) throw Error(ErrorCode::ConfigError, "epsilon must be positive");
  if (!(s.t_max > 0.0)) throw Error(ErrorCode::ConfigError, "t_max must be positive");
  const auto check = [](const Environment& env, const std::optional<BlochState>& declared, const char* name) {
    if (!declared) return;
    const BlochState computed = bloch::stationary_bloch(bloch::build_affine(env));
    if ((computed.r - declared->r).norm() > kDeclaredStateTolerance)
      throw Error(ErrorCode::SteadyStateMismatch, std::string("declared steady state of ") + name +
                                              " differs from the computed fixed point");
  };
  check(s.env_F, s.declared_F, "target environment");
  check(s.env_A, s.declared_A, "auxiliary environment");
}

/// Repulsion from the target first (positive initial slope), then the first-minimum / crossing split.
inline CaseAnalysis classify_case(const MonitorSeries& direct, const MonitorSeries& auxiliary) {
  CaseAnalysis a;
  const BlochState r_S = auxiliary.trajectory.state(0);
  a.initial_derivative_aux = detail::initial_derivative(r_S, auxiliary.trajectory.generator, auxiliary.reference);
  a.initial_derivative_target = detail::initial_derivative(r_S, direct.trajectory.generator, direct.reference);
  a.first_minimum = dynamics::first_minimum(auxiliary);
  a.crossing = dynamics::crossing_time(auxiliary, direct);
  if (a.initial_derivative_aux > dynamics::kFlatDerivative) {
    a.label = CaseLabel::Case3Repelled;
  } else if (a.first_minimum) {
    a.label = a.crossing ? CaseLabel::Case1Crossing : CaseLabel::Case1NoCrossing;
  } else {
    a.label = CaseLabel::Case2Monotone;
  }
  return a;
}

inline ProtocolContext prepare(const Scenario& scenario) {
  validate_scenario(scenario);
  ProtocolContext ctx(scenario);
  ctx.gen_F = bloch::build_affine(scenario.env_F);
  ctx.gen_A = bloch::build_affine(scenario.env_A);
  ctx.r_F = bloch::stationary_bloch(ctx.gen_F);
  ctx.r_A = bloch::stationary_bloch(ctx.gen_A);

  const auto& tol = scenario.tol;
  const double eps = scenario.epsilon;
  auto direct = dynamics::integrate(ctx.gen_F, scenario.r_S, scenario.t_max, tol,
                                    dynamics::stop_within(ctx.r_F, eps), "F");
  ctx.direct = dynamics::monitor(direct, ctx.r_F);
  ctx.t_SF = dynamics::convergence_time(ctx.direct, eps);

  auto aux = dynamics::integrate(ctx.gen_A, scenario.r_S, scenario.t_max, tol,
                                 dynamics::stop_within(ctx.r_A, eps), "A");
  try {
    ctx.t_SA = dynamics::convergence_time(dynamics::monitor(aux, ctx.r_A), eps);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NoConvergence) throw;
  }
  ctx.auxiliary = dynamics::monitor(aux, ctx.r_F);
  ctx.analysis = classify_case(ctx.direct, ctx.auxiliary);
  return ctx;
}

struct DirectRun {
  double t_SF = 0.0;
  Trajectory trajectory;
  MonitorSeries series;
};

inline DirectRun run_direct(const Scenario& scenario) {
  validate_scenario(scenario);
  const auto gen_F = bloch::build_affine(scenario.env_F);
  const BlochState r_F = bloch::stationary_bloch(gen_F);
  DirectRun run;
  run.trajectory = dynamics::integrate(gen_F, scenario.r_S, scenario.t_max, scenario.tol,
                                       dynamics::stop_within(r_F, scenario.epsilon), "F");
  run.series = dynamics::monitor(run.trajectory, r_F);
  run.t_SF = dynamics::convergence_time(run.series, scenario.epsilon);
  return run;
}

inline CaseAnalysis classify_case(const Environment& env_F, const Environment& env_A, const BlochState& r_S,
                                  double epsilon = dynamics::kDefaultEpsilon,
                                  double t_max = dynamics::kDefaultTMax, const ToleranceSpec& tol = {}) {
  Scenario s{env_F, env_A, r_S, epsilon, 0.0, t_max, tol, std::nullopt, std::nullopt};
  return prepare(s).analysis;
}

/// Ordered checks: Strong (d_A > d_SF), then weak type B (d_SF >= d_A >= d_F),
/// then weak type A (d_A < d_F). Comparisons use a 1e-9 equality band and
/// ties fall to the weaker claim; d_A = d_F lands on type B. When all three
/// distances coincide (no switch happened) the result is None.
inline PmeType classify_pme_type(double d_SF, double d_A_at_tSI, double d_F_at_tSI) {
  constexpr double tol = kClassificationTolerance;
  if (std::abs(d_A_at_tSI - d_SF) <= tol && std::abs(d_F_at_tSI - d_SF) <= tol) return PmeType::None;
  if (d_A_at_tSI > d_SF + tol) return PmeType::Strong;
  if (d_A_at_tSI >= d_F_at_tSI - tol) return PmeType::WeakTypeB;
  return PmeType::WeakTypeA;
}

inline ProtocolResult run_two_step(const ProtocolContext& ctx, double t_SI) {
  const auto& s = ctx.scenario;
  if (!(t_SI >= 0.0)) throw Error(ErrorCode::InvalidSwitchTime, "t_SI must be non-negative");
  if (ctx.t_SA && t_SI >= *ctx.t_SA && !(t_SI == 0.0 && *ctx.t_SA == 0.0))
    throw Error(ErrorCode::InvalidSwitchTime,
                "t_SI = " + std::to_string(t_SI) + " is not below t_SA = " + std::to_string(*ctx.t_SA));

  ProtocolResult r;
  r.t_SF = ctx.t_SF;
  r.t_SI = t_SI;
  r.t_SA = ctx.t_SA;
  r.epsilon = s.epsilon;
  r.analysis = ctx.analysis;
  r.case_label = ctx.analysis.label;
  r.r_F = ctx.r_F;
  r.r_A = ctx.r_A;
  r.direct = ctx.direct;
  r.auxiliary = ctx.auxiliary;

  auto leg1 = dynamics::integrate(ctx.gen_A, s.r_S, t_SI, s.tol, {}, "A");
  r.r_I = leg1.final_state();
  r.switch_leg = dynamics::monitor(leg1, ctx.r_F);

  // Copy 1 evaluated exactly at t_SI, independent of where its run stopped.
  const auto direct_to_switch = dynamics::integrate(ctx.gen_F, s.r_S, t_SI, s.tol, {}, "F");
  r.d_F_at_tSI = trace_distance(direct_to_switch.final_state(), ctx.r_F);
  r.d_A_at_tSI = trace_distance(r.r_I, ctx.r_F);
  r.d_SF = trace_distance(s.r_S, ctx.r_F);

  auto leg2 = dynamics::integrate_span(ctx.gen_F, r.r_I, t_SI, t_SI + s.t_max, s.tol,
                                       dynamics::stop_within(ctx.r_F, s.epsilon), "F");
  r.relax_leg = dynamics::monitor(leg2, ctx.r_F);
  r.t_IF = dynamics::convergence_time(r.relax_leg, s.epsilon) - t_SI;
  r.copies_crossing = dynamics::crossing_time(r.relax_leg, r.direct);

  r.pme_type = classify_pme_type(r.d_SF, r.d_A_at_tSI, r.d_F_at_tSI);
  r.pme_occurs = r.t_SI + r.t_IF < r.t_SF;
  return r;
}

inline ProtocolResult run_two_step(const Scenario& scenario) { return run_two_step(prepare(scenario), scenario.t_SI); }

struct SweepPoint {
  double t_SI = 0.0;
  std::optional<ProtocolResult> result;
  std::string error;  // empty on success

  bool ok() const { return result.has_value(); }
  double total() const { return result ? result->t_SI + result->t_IF : 0.0; }
};

struct SweepResult {
  std::vector<SweepPoint> points;
  std::optional<std::size_t> argmin;  // index minimizing t_SI + t_IF
  bool any_pme = false;
};

/// Runs the two-step protocol for every grid value; points are independent
/// and evaluated concurrently, the table keeps the grid order.
inline SweepResult sweep_tSI(const Scenario& scenario, const std::vector<double>& grid, unsigned workers = 0) {
  if (grid.empty()) throw Error(ErrorCode::ConfigError, "empty t_SI grid");
  const ProtocolContext ctx = prepare(scenario);
  SweepResult out;
  out.points.resize(grid.size());

  auto run_point = [&ctx, &grid, &out](std::size_t i) {
    SweepPoint& p = out.points[i];
    p.t_SI = grid[i];
    try {
      p.result = run_two_step(ctx, grid[i]);
    } catch (const Error& e) {
      p.error = e.what();
    }
  };

  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, static_cast<unsigned>(grid.size()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < grid.size(); ++i) run_point(i);
  } else {
    std::vector<std::future<void>> tasks;
    for (unsigned w = 0; w < workers; ++w) {
      tasks.push_back(std::async(std::launch::async, [&, w] {
        for (std::size_t i = w; i < grid.size(); i += workers) run_point(i);
      }));
    }
    for (auto& t : tasks) t.get();
  }

  for (std::size_t i = 0; i < out.points.size(); ++i) {
    const auto& p = out.points[i];
    if (!p.ok()) continue;
    out.any_pme = out.any_pme || p.result->pme_occurs;
    if (!out.argmin || p.total() < out.points[*out.argmin].total()) out.argmin = i;
  }
  return out;
}

}  // namespace pme::protocol

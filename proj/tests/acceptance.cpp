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


// Acceptance suite: one PASS/FAIL line per criterion, tolerances fixed below.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>

#include "support.hpp"

namespace {

using namespace pme;
using pme::CMat3;
using pme::CMatrix;
using protocol::CaseLabel;
using protocol::PmeType;

constexpr double kLabelEpsilons[] = {1e-3, 1e-2};
constexpr double kRuntimeBudgetSeconds = 5.0;
constexpr double kDeclaredTolerance = 1e-2;
constexpr double kReconstructedTolerance = 1e-9;
constexpr double kImaginaryPartTolerance = 1e-12;
constexpr double kPlaneDrift = 1e-9;
constexpr double kPlaneHorizon = 10.0;
constexpr double kEquivalenceTolerance = 1e-12;
constexpr double kAnalyticRelative = 1e-4;
constexpr double kContractivitySlack = 1e-9;
constexpr double kTraceTolerance = 1e-10;
constexpr double kHermiticityTolerance = 1e-10;
constexpr double kEigenvalueFloor = -1e-9;
constexpr double kBlochSlack = 1e-9;
constexpr std::size_t kMinOscillationExtrema = 2;
constexpr double kUnitaryRadiusTolerance = 1e-9;
constexpr double kUnitaryIntegratorTolerance = 1e-12;
constexpr double kFormTolerance = 1e-10;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

std::string label(CaseLabel c) { return std::string(protocol::to_string(c)); }
std::string label(PmeType t) { return std::string(protocol::to_string(t)); }

/// Checks (t_SI, expected type) pairs and accumulates a readable trace.
bool check_types(const protocol::ProtocolContext& ctx, const std::vector<std::pair<double, PmeType>>& expected,
                 std::ostringstream& detail) {
  bool ok = true;
  for (const auto& [t_si, type] : expected) {
    const auto got = protocol::run_two_step(ctx, t_si).pme_type;
    detail << " t_SI=" << t_si << ":" << label(got);
    ok = ok && got == type;
  }
  return ok;
}

Outcome fig2a_classification() {
  const auto start = std::chrono::steady_clock::now();
  std::ostringstream d;
  bool ok = true;
  for (double eps : kLabelEpsilons) {
    auto s = test_support::scenario("fig2a");
    s.epsilon = eps;
    const auto ctx = protocol::prepare(s);
    d << " [eps=" << eps << " case=" << label(ctx.analysis.label);
    if (ctx.analysis.crossing) d << " crossing=" << fmt(*ctx.analysis.crossing);
    ok = ok && ctx.analysis.label == CaseLabel::Case1Crossing && ctx.analysis.crossing.has_value();
    ok = check_types(ctx, {{0.1, PmeType::WeakTypeA}, {0.15, PmeType::WeakTypeB}, {0.25, PmeType::Strong}}, d) && ok;
    d << "]";
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  d << " runtime=" << fmt(seconds) << "s";
  return {ok && seconds < kRuntimeBudgetSeconds, d.str()};
}

Outcome fig2b_classification() {
  std::ostringstream d;
  const auto ctx = protocol::prepare(test_support::scenario("fig2b"));
  d << " case=" << label(ctx.analysis.label);
  if (ctx.analysis.crossing) d << " crossing=" << fmt(*ctx.analysis.crossing);
  d << " dD_aux(0)=" << fmt(ctx.analysis.initial_derivative_aux)
    << " dD_direct(0)=" << fmt(ctx.analysis.initial_derivative_target);
  const bool label_ok = ctx.analysis.label == CaseLabel::Case1NoCrossing;
  const bool types_ok = check_types(ctx, {{0.08, PmeType::WeakTypeB}, {0.2, PmeType::Strong}}, d);
  return {label_ok && types_ok, d.str()};
}

Outcome fig2c_classification() {
  std::ostringstream d;
  const auto ctx = protocol::prepare(test_support::scenario("fig2c"));
  const double deriv = ctx.analysis.initial_derivative_aux;
  d << " case=" << label(ctx.analysis.label) << " dD_aux(0)=" << fmt(deriv);
  if (ctx.analysis.first_minimum) d << " t_M=" << fmt(ctx.analysis.first_minimum->time);
  const bool label_ok = ctx.analysis.label == CaseLabel::Case3Repelled && deriv > 0.0;
  const bool types_ok = check_types(ctx, {{0.15, PmeType::Strong}}, d);
  return {label_ok && types_ok, d.str()};
}

Outcome steady_state_fidelity() {
  double worst_declared = 0.0, worst_rebuilt = 0.0;
  for (const auto& name : test_support::fixture_names()) {
    for (const auto& ec : test_support::fixture(name).environments) {
      if (!ec.declared_steady_state) continue;
      const Vec3 declared = ec.declared_steady_state->r;
      const Vec3 computed = bloch::bloch_map(lindblad::steady_state(ec.environment())).r;
      worst_declared = std::max(worst_declared, (computed - declared).norm());
      const auto rebuilt = bloch::environment_from_target(ec.kossakowski.real(), ec.h, *ec.declared_steady_state);
      const Vec3 fixed = bloch::bloch_map(lindblad::steady_state(rebuilt)).r;
      worst_rebuilt = std::max(worst_rebuilt, (fixed - declared).norm());
    }
  }
  const auto ec = test_support::fixture("fig2a").environment("F");
  const auto rebuilt = bloch::environment_from_target(ec.kossakowski.real(), ec.h, BlochState(0.5, 0.5, 0.0));
  const double im23 = rebuilt.kossakowski()(1, 2).imag(), im31 = rebuilt.kossakowski()(2, 0).imag();
  const bool im_ok = std::abs(im23 + 2.0625) < kImaginaryPartTolerance && std::abs(im31 + 0.9375) < kImaginaryPartTolerance;
  return {worst_declared <= kDeclaredTolerance && worst_rebuilt <= kReconstructedTolerance && im_ok,
          " max|shipped-declared|=" + fmt(worst_declared) + " max|rebuilt-declared|=" + fmt(worst_rebuilt) +
              " ImC23=" + fmt(im23) + " ImC31=" + fmt(im31)};
}

Outcome plane_confinement() {
  bool conditions = true;
  double worst = 0.0;
  for (const auto& name : test_support::fixture_names()) {
    const auto s = test_support::scenario(name);
    for (const Environment* env : {&s.env_F, &s.env_A}) {
      conditions = conditions && bloch::plane_condition_check(*env);
      const auto traj = dynamics::integrate(*env, s.r_S, kPlaneHorizon, s.tol);
      for (std::size_t i = 0; i < traj.size(); ++i) worst = std::max(worst, std::abs(traj.state(i).r(2)));
    }
  }
  return {conditions && worst < kPlaneDrift,
          std::string(" conditions=") + (conditions ? "ok" : "violated") + " max|r3|=" + fmt(worst)};
}

Outcome liouvillian_bloch_equivalence() {
  std::mt19937_64 rng(2026);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const Environment env = test_support::random_environment(rng, 2);
    const auto gen = bloch::build_affine(env);
    const auto liouvillian = lindblad::build_liouvillian(env);
    const BlochState r = test_support::random_bloch(rng);
    const CMatrix drho = lindblad::unvectorize_rows(
        liouvillian.matrix * lindblad::vectorize_rows(bloch::density_from_bloch(r).matrix()), 2);
    worst = std::max(worst, (bloch::bloch_components(drho) - gen.velocity(r.r)).cwiseAbs().maxCoeff());
  }
  return {worst < kEquivalenceTolerance, " max deviation=" + fmt(worst) + " over 100 environments"};
}

Outcome analytic_oracle() {
  double worst = 0.0;
  const double eps = 1e-3;
  for (double gamma : {0.25, 1.0, 3.0}) {
    for (double d0 : {0.5, 0.2, 0.05}) {
      const Environment env = bloch::qubit_environment(gamma * CMat3::Identity(), Vec3::Zero());
      const BlochState r0(0.0, 2.0 * d0 * std::sqrt(0.5), 2.0 * d0 * std::sqrt(0.5));
      const auto series = dynamics::monitor(dynamics::integrate(env, r0, 50.0, {}, dynamics::stop_within(BlochState(), eps)),
                                            BlochState());
      const double expected = std::log(d0 / eps) / (4.0 * gamma);
      worst = std::max(worst, std::abs(dynamics::convergence_time(series, eps) - expected) / expected);
    }
  }
  return {worst < kAnalyticRelative, " max relative error=" + fmt(worst)};
}

Outcome contractivity() {
  std::mt19937_64 rng(7);
  double worst = -1.0;
  for (int k = 0; k < 200; ++k) {
    Environment env = test_support::random_qubit_environment(rng);
    if (k % 4 == 0) {
      // strong coherent part, |h3| = 10
      const Vec3 h = bloch::hamiltonian_vector(env);
      CMat3 c = env.kossakowski();
      env = bloch::qubit_environment(c, Vec3(h(0), h(1), k % 8 == 0 ? 10.0 : -10.0));
    }
    const auto gen = bloch::build_affine(env);
    const auto series =
        dynamics::monitor(dynamics::integrate(gen, test_support::random_bloch(rng), 5.0, {}), bloch::stationary_bloch(gen));
    for (std::size_t i = 1; i < series.values.size(); ++i) worst = std::max(worst, series.values[i] - series.values[i - 1]);
  }
  return {worst <= kContractivitySlack, " max per-step increase=" + fmt(worst) + " over 200 pairs"};
}

Outcome cptp_invariants() {
  double trace_dev = 0.0, herm_dev = 0.0, min_eig = 1.0, max_norm = 0.0;
  auto visit_matrix = [&](const CMatrix& rho) {
    trace_dev = std::max(trace_dev, std::abs(rho.trace() - Complex(1.0)));
    herm_dev = std::max(herm_dev, lindblad::hermiticity_deviation(rho));
    Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (rho + rho.adjoint()));
    min_eig = std::min(min_eig, es.eigenvalues().minCoeff());
  };
  auto visit_series = [&](const dynamics::MonitorSeries& series) {
    for (std::size_t i = 0; i < series.trajectory.size(); ++i) {
      const Vec3 r = series.trajectory.state(i).r;
      max_norm = std::max(max_norm, r.norm());
      visit_matrix(bloch::bloch_to_matrix(r));
    }
  };
  for (const auto& name : test_support::fixture_names()) {
    const auto s = test_support::scenario(name);
    const auto ctx = protocol::prepare(s);
    const auto r = protocol::run_two_step(ctx, s.t_SI);
    for (const auto* series : {&r.direct, &r.auxiliary, &r.switch_leg, &r.relax_leg}) visit_series(*series);
    for (const Environment* env : {&s.env_F, &s.env_A}) {
      const auto path = dynamics::integrate_density(*env, bloch::density_from_bloch(s.r_S), ctx.t_SF, s.tol);
      for (const auto& v : path.states) visit_matrix(lindblad::unvectorize_rows(v, 2));
    }
  }
  const bool ok = trace_dev < kTraceTolerance && herm_dev < kHermiticityTolerance && min_eig >= kEigenvalueFloor &&
                  max_norm <= 1.0 + kBlochSlack;
  return {ok, " trace dev=" + fmt(trace_dev) + " hermiticity dev=" + fmt(herm_dev) + " min eig=" + fmt(min_eig) +
                  " max|r|=" + fmt(max_norm)};
}

Outcome quantum_dominated() {
  const auto s = test_support::scenario("figA1");
  const auto ctx = protocol::prepare(s);
  const auto extrema = dynamics::local_extrema(ctx.auxiliary);
  const Environment unitary = bloch::qubit_environment(CMat3::Zero(), bloch::hamiltonian_vector(s.env_A));
  ToleranceSpec tight;
  tight.abs = kUnitaryIntegratorTolerance;
  tight.rel = kUnitaryIntegratorTolerance;
  const auto traj = dynamics::integrate(unitary, s.r_S, ctx.t_SF, tight);
  double drift = 0.0;
  for (std::size_t i = 0; i < traj.size(); ++i) drift = std::max(drift, std::abs(traj.state(i).norm() - s.r_S.norm()));
  return {extrema.size() >= kMinOscillationExtrema && drift < kUnitaryRadiusTolerance,
          " interior extrema=" + std::to_string(extrema.size()) + " case=" + label(ctx.analysis.label) +
              " unitary radius drift=" + fmt(drift) + " over t<=" + fmt(ctx.t_SF)};
}

Outcome form_equivalence() {
  std::mt19937_64 rng(99);
  double worst = 0.0;
  auto check = [&](const Environment& env) {
    const auto form = lindblad::diagonalize_kossakowski(env);
    for (int k = 0; k < 20; ++k) {
      const CMatrix rho = test_support::random_density(rng, env.dim()).matrix();
      worst = std::max(worst, (lindblad::dissipator_first_form(rho, env) - lindblad::dissipator_diagonal_form(rho, form))
                                  .cwiseAbs()
                                  .maxCoeff());
    }
  };
  for (const auto& name : test_support::fixture_names())
    for (const auto& ec : test_support::fixture(name).environments) check(ec.environment());
  for (int k = 0; k < 100; ++k) check(test_support::random_environment(rng, 2));
  return {worst < kFormTolerance, " max deviation=" + fmt(worst)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"fig2a fixture classification", fig2a_classification},
      {"fig2b fixture classification", fig2b_classification},
      {"fig2c fixture classification", fig2c_classification},
      {"steady-state fidelity", steady_state_fidelity},
      {"plane confinement", plane_confinement},
      {"liouvillian/bloch equivalence", liouvillian_bloch_equivalence},
      {"analytic exponential oracle", analytic_oracle},
      {"contractivity", contractivity},
      {"cptp invariants", cptp_invariants},
      {"quantum-dominated regime", quantum_dominated},
      {"form equivalence", form_equivalence},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string(" error: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << ":" << o.detail << "\n";
  }
  std::cout << criteria.size() - failed << "/" << criteria.size() << " criteria passed\n";
  return failed == 0 ? 0 : 1;
}

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

// Trajectories of the Bloch vector, trace-distance monitors and the
// analytics run on them: convergence time, extrema, crossings.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pme/bloch.hpp"
#include "pme/error.hpp"
#include "pme/integrator.hpp"
#include "pme/lindblad.hpp"

namespace pme {

using ode::ToleranceSpec;

namespace dynamics {

inline constexpr double kDefaultEpsilon = 1e-3;
inline constexpr double kDefaultTMax = 50.0;
inline constexpr double kBracketTolerance = 1e-9;
inline constexpr double kFlatDerivative = 1e-10;
inline constexpr double kTieTolerance = 1e-10;
inline constexpr double kDegenerateReference = 1e-12;

using StopPredicate = std::function<bool(double, const Vec3&)>;

struct Trajectory {
  ode::DenseOutput<Vec3> path;
  AffineGenerator generator;
  std::string env_id;

  const std::vector<double>& times() const { return path.times; }
  std::size_t size() const { return path.size(); }
  double t_end() const { return path.t_end(); }
  BlochState state(std::size_t i) const { return BlochState(path.states[i]); }
  BlochState state_at(double t) const { return BlochState(path.at(t)); }
  BlochState final_state() const { return BlochState(path.states.back()); }
};

struct MonitorSeries {
  Trajectory trajectory;
  BlochState reference;
  std::vector<double> values;

  const std::vector<double>& times() const { return trajectory.times(); }
  double value_at(double t) const { return trace_distance(trajectory.state_at(t), reference); }
  /// Analytic time derivative evaluated on the dense interpolant.
  double derivative_at(double t) const;
  double derivative(std::size_t i) const;
};

/// Integrates from t_start to t_end with absolute times kept in the trajectory.
inline Trajectory integrate_span(const AffineGenerator& gen, const BlochState& r0, double t_start, double t_end,
                                 const ToleranceSpec& tol, const StopPredicate& stop = {},
                                 std::string env_id = {}) {
  if (!r0.is_physical())
    throw Error(ErrorCode::BlochNormExceeded, "initial |r| = " + std::to_string(r0.norm()));
  if (!(t_end >= t_start)) throw Error(ErrorCode::ConfigError, "integration end precedes start");
  auto rhs = [&gen](double, const Vec3& r) -> Vec3 { return gen.velocity(r); };
  Trajectory traj;
  traj.generator = gen;
  traj.env_id = std::move(env_id);
  if (stop) {
    traj.path = ode::integrate<Vec3>(rhs, t_start, r0.r, t_end, tol,
                                     [&stop](double t, const Vec3& r) { return stop(t, r); });
  } else {
    traj.path = ode::integrate<Vec3>(rhs, t_start, r0.r, t_end, tol);
  }
  return traj;
}

inline Trajectory integrate(const AffineGenerator& gen, const BlochState& r0, double t_max,
                            const ToleranceSpec& tol, const StopPredicate& stop = {},
                            std::string env_id = {}) {
  return integrate_span(gen, r0, 0.0, t_max, tol, stop, std::move(env_id));
}

/// Adaptive solution of r' = 2 Lambda r + b on [0, t_max].
inline Trajectory integrate(const Environment& env, const BlochState& r0, double t_max,
                            const ToleranceSpec& tol = {}, const StopPredicate& stop = {},
                            std::string env_id = {}) {
  lindblad::require_valid(env);
  return integrate(bloch::build_affine(env), r0, t_max, tol, stop, std::move(env_id));
}

/// Stops once the trace distance to `reference` is at most `epsilon`.
inline StopPredicate stop_within(const BlochState& reference, double epsilon) {
  return [ref = reference.r, epsilon](double, const Vec3& r) { return 0.5 * (r - ref).norm() <= epsilon; };
}

inline MonitorSeries monitor(const Trajectory& traj, const BlochState& reference) {
  MonitorSeries series{traj, reference, {}};
  series.values.reserve(traj.size());
  for (std::size_t i = 0; i < traj.size(); ++i) series.values.push_back(trace_distance(traj.state(i), reference));
  return series;
}

/// d/dt D_T(r(t), r_ref) = (r - r_ref) . v(r) / (2 |r - r_ref|).
inline double monitor_derivative(const BlochState& r, const AffineGenerator& gen, const BlochState& reference) {
  const Vec3 diff = r.r - reference.r;
  const double dist = diff.norm();
  if (dist < kDegenerateReference)
    throw Error(ErrorCode::DegenerateReference, "state coincides with the reference");
  return diff.dot(gen.velocity(r.r)) / (2.0 * dist);
}

inline double monitor_derivative(const BlochState& r, const Environment& env, const BlochState& reference) {
  return monitor_derivative(r, bloch::build_affine(env), reference);
}

inline double MonitorSeries::derivative_at(double t) const {
  const BlochState r = trajectory.state_at(t);
  if ((r.r - reference.r).norm() < kDegenerateReference) return 0.0;
  return monitor_derivative(r, trajectory.generator, reference);
}

inline double MonitorSeries::derivative(std::size_t i) const {
  const BlochState r = trajectory.state(i);
  if ((r.r - reference.r).norm() < kDegenerateReference) return 0.0;
  return monitor_derivative(r, trajectory.generator, reference);
}

inline double scalar_velocity(const BlochState& r, const AffineGenerator& gen) { return gen.velocity(r.r).norm(); }

inline double scalar_velocity(const BlochState& r, const Environment& env) {
  return scalar_velocity(r, bloch::build_affine(env));
}

namespace detail {

/// Bisection for a sign change of g on [lo, hi]; g(lo) and g(hi) must differ in sign.
template <class F>
double bisect(F&& g, double lo, double hi, double width = kBracketTolerance) {
  const bool lo_negative = g(lo) < 0.0;
  while (hi - lo > width) {
    const double mid = 0.5 * (lo + hi);
    if ((g(mid) < 0.0) == lo_negative) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

inline int flat_sign(double x, double flat) { return x > flat ? 1 : (x < -flat ? -1 : 0); }

}  // namespace detail

/// First t_c with D_T(t_c) = epsilon; the series start time when it starts
/// at or below epsilon.
inline double convergence_time(const MonitorSeries& series, double epsilon) {
  if (!(epsilon > 0.0)) throw Error(ErrorCode::ConfigError, "epsilon must be positive");
  const auto& t = series.times();
  if (series.values.front() <= epsilon) return t.front();
  for (std::size_t i = 1; i < series.values.size(); ++i) {
    if (series.values[i] <= epsilon) {
      return detail::bisect([&](double s) { return series.value_at(s) - epsilon; }, t[i - 1], t[i]);
    }
  }
  throw Error(ErrorCode::NoConvergence,
              "trace distance stays above epsilon up to t = " + std::to_string(t.back()));
}

enum class ExtremumKind { Minimum, Maximum };

struct Extremum {
  double time = 0.0;
  double value = 0.0;
  ExtremumKind kind = ExtremumKind::Minimum;
};

/// Interior extrema located by sign changes of the analytic derivative.
/// Derivatives with magnitude below 1e-10 count as zero; a flat stretch
/// followed by a change of direction puts the extremum at the stretch start.
inline std::vector<Extremum> local_extrema(const MonitorSeries& series) {
  std::vector<Extremum> out;
  const auto& t = series.times();
  int last_sign = 0;
  std::optional<std::size_t> flat_start;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const int s = detail::flat_sign(series.derivative(i), kFlatDerivative);
    if (s == 0) {
      if (!flat_start) flat_start = i;
      continue;
    }
    if (last_sign != 0 && s != last_sign) {
      Extremum e;
      e.kind = last_sign < 0 ? ExtremumKind::Minimum : ExtremumKind::Maximum;
      if (flat_start) {
        e.time = t[*flat_start];
      } else {
        e.time = detail::bisect([&](double x) { return series.derivative_at(x); }, t[i - 1], t[i]);
      }
      e.value = series.value_at(e.time);
      out.push_back(e);
    }
    last_sign = s;
    flat_start.reset();
  }
  return out;
}

inline std::optional<Extremum> first_minimum(const MonitorSeries& series) {
  for (const auto& e : local_extrema(series))
    if (e.kind == ExtremumKind::Minimum) return e;
  return std::nullopt;
}

/// First time where s1 - s2 changes sign over the shared time range.
/// Differences within 1e-10 are ties and never count as a crossing; where
/// the curves touch, the sign just after the touching point comes from the
/// analytic derivatives, so departures shorter than one step are not lost.
inline std::optional<double> crossing_time(const MonitorSeries& s1, const MonitorSeries& s2) {
  const double lo = std::max(s1.times().front(), s2.times().front());
  const double hi = std::min(s1.times().back(), s2.times().back());
  if (!(hi > lo)) return std::nullopt;
  std::vector<double> grid;
  for (const auto* s : {&s1, &s2})
    for (double x : s->times())
      if (x >= lo && x <= hi) grid.push_back(x);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  auto diff = [&](double x) { return s1.value_at(x) - s2.value_at(x); };
  auto sign_after = [&](double x) {
    const int s = detail::flat_sign(diff(x), kTieTolerance);
    if (s != 0) return s;
    return detail::flat_sign(s1.derivative_at(x) - s2.derivative_at(x), kFlatDerivative);
  };

  int ref_sign = 0;
  double ref_time = lo;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double x = grid[k];
    const int s = k + 1 < grid.size() ? sign_after(x) : detail::flat_sign(diff(x), kTieTolerance);
    if (s == 0) continue;
    if (ref_sign == 0 || s == ref_sign) {
      ref_sign = s;
      ref_time = x;
      continue;
    }
    // Bracket [ref_time, x]: ties near the left end count as the old sign.
    double a = ref_time, b = x;
    while (b - a > kBracketTolerance) {
      const double mid = 0.5 * (a + b);
      if (detail::flat_sign(diff(mid), kTieTolerance) != -ref_sign) {
        a = mid;
      } else {
        b = mid;
      }
    }
    return 0.5 * (a + b);
  }
  return std::nullopt;
}

/// General-N propagation of the row-stacked density matrix under the
/// Liouvillian, with the same adaptive scheme as the Bloch trajectories.
inline ode::DenseOutput<CVector> integrate_density(const Environment& env, const DensityMatrix& rho0, double t_max,
                                                   const ToleranceSpec& tol = {}) {
  lindblad::require_valid(env);
  if (rho0.dim() != env.dim()) throw Error(ErrorCode::DimensionMismatch, "state and environment dimensions differ");
  const auto liouvillian = lindblad::build_liouvillian(env);
  auto rhs = [&liouvillian](double, const CVector& v) -> CVector { return liouvillian.matrix * v; };
  return ode::integrate<CVector>(rhs, 0.0, lindblad::vectorize_rows(rho0.matrix()), t_max, tol);
}

}  // namespace dynamics
}  // namespace pme

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

// Embedded Dormand-Prince 5(4) integrator with cubic Hermite dense output.
// Works for any Eigen column-vector state (real or complex).

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "pme/error.hpp"

namespace pme::ode {

struct ToleranceSpec {
  double abs = 1e-10;
  double rel = 1e-9;
  double initial_step = 0.0;  // 0 selects a step automatically
  double max_step = std::numeric_limits<double>::infinity();
  std::size_t max_steps = 10'000'000;
};

/// Accepted steps plus endpoint derivatives; evaluation between them uses
/// cubic Hermite interpolation.
template <class State>
struct DenseOutput {
  std::vector<double> times;
  std::vector<State> states;
  std::vector<State> derivatives;
  bool stopped_early = false;
  std::size_t rejected_steps = 0;

  double t_begin() const { return times.front(); }
  double t_end() const { return times.back(); }
  std::size_t size() const { return times.size(); }

  State at(double t) const { return interpolate(t, false); }
  State derivative_at(double t) const { return interpolate(t, true); }

 private:
  State interpolate(double t, bool derivative) const {
    if (times.size() == 1) return derivative ? derivatives.front() : states.front();
    t = std::clamp(t, times.front(), times.back());
    auto it = std::upper_bound(times.begin(), times.end(), t);
    std::size_t k = it == times.end() ? times.size() - 1 : static_cast<std::size_t>(it - times.begin());
    k = std::max<std::size_t>(k, 1);
    const std::size_t j = k - 1;
    const double h = times[k] - times[j];
    const double s = (t - times[j]) / h;
    const double s2 = s * s, s3 = s2 * s;
    if (!derivative) {
      return (2 * s3 - 3 * s2 + 1) * states[j] + (s3 - 2 * s2 + s) * h * derivatives[j] +
             (-2 * s3 + 3 * s2) * states[k] + (s3 - s2) * h * derivatives[k];
    }
    return ((6 * s2 - 6 * s) * states[j] + (-6 * s2 + 6 * s) * states[k]) / h +
           (3 * s2 - 4 * s + 1) * derivatives[j] + (3 * s2 - 2 * s) * derivatives[k];
  }
};

namespace detail {

// Dormand-Prince tableau.
inline constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                        a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                        a65 = -5103.0 / 18656;
inline constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                        b6 = 11.0 / 84;
inline constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                        e6 = 22.0 / 525, e7 = -1.0 / 40;

template <class State>
struct StepResult {
  State y;
  State f;
  State error;
};

template <class State, class Rhs>
StepResult<State> dopri_step(Rhs& f, double t, const State& y, const State& k1, double h) {
  const State k2 = f(t + c2 * h, State(y + h * a21 * k1));
  const State k3 = f(t + c3 * h, State(y + h * (a31 * k1 + a32 * k2)));
  const State k4 = f(t + c4 * h, State(y + h * (a41 * k1 + a42 * k2 + a43 * k3)));
  const State k5 = f(t + c5 * h, State(y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4)));
  const State k6 = f(t + h, State(y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5)));
  State y_new = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
  State k7 = f(t + h, y_new);
  State err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
  return {std::move(y_new), std::move(k7), std::move(err)};
}

template <class State>
double scaled_norm(const State& v, const State& y0, const State& y1, const ToleranceSpec& tol) {
  const auto scale = (tol.abs + tol.rel * y0.cwiseAbs().cwiseMax(y1.cwiseAbs()).array()).eval();
  const auto ratio = (v.cwiseAbs().array() / scale).eval();
  return std::sqrt(ratio.square().mean());
}

template <class State, class Rhs>
double initial_step(Rhs& f, double t0, const State& y0, const State& f0, const ToleranceSpec& tol) {
  const double d0 = scaled_norm(y0, y0, y0, tol);
  const double d1 = scaled_norm(f0, y0, y0, tol);
  double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
  const State y1 = y0 + h0 * f0;
  const State f1 = f(t0 + h0, y1);
  const double d2 = scaled_norm(State(f1 - f0), y0, y0, tol) / h0;
  const double dmax = std::max(d1, d2);
  const double h1 = dmax <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dmax, 1.0 / 5.0);
  return std::min(100.0 * h0, h1);
}

}  // namespace detail

struct NeverStop {
  template <class State>
  bool operator()(double, const State&) const {
    return false;
  }
};

/// Integrates y' = f(t, y) from t0 to t1, landing exactly on t1. `stop` is
/// checked after every accepted step; returning true ends the integration there.
template <class State, class Rhs, class Stop = NeverStop>
DenseOutput<State> integrate(Rhs f, double t0, const State& y0, double t1, const ToleranceSpec& tol,
                             Stop stop = {}) {
  if (!(t1 >= t0)) throw Error(ErrorCode::ConfigError, "integration end precedes start");
  DenseOutput<State> out;
  State y = y0;
  State k1 = f(t0, y);
  out.times.push_back(t0);
  out.states.push_back(y);
  out.derivatives.push_back(k1);
  if (t1 == t0 || stop(t0, y)) {
    out.stopped_early = t1 != t0;
    return out;
  }

  double t = t0;
  double h = tol.initial_step > 0 ? tol.initial_step : detail::initial_step(f, t0, y, k1, tol);
  h = std::min({h, tol.max_step, t1 - t0});
  const double span = t1 - t0;
  std::size_t steps = 0;

  while (t < t1) {
    if (++steps > tol.max_steps) throw Error(ErrorCode::StepSizeUnderflow, "step budget exhausted");
    const double min_step = 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t));
    if (h < min_step) throw Error(ErrorCode::StepSizeUnderflow, "step size " + std::to_string(h) + " at t = " + std::to_string(t));

    bool last = false;
    if (t + h >= t1 - 1e-12 * span) {
      h = t1 - t;
      last = true;
    }

    auto step = detail::dopri_step<State>(f, t, y, k1, h);
    const double err = detail::scaled_norm(step.error, y, step.y, tol);
    if (!std::isfinite(err)) {
      h *= 0.2;
      ++out.rejected_steps;
      continue;
    }
    if (err <= 1.0) {
      t = last ? t1 : t + h;
      y = std::move(step.y);
      k1 = std::move(step.f);
      out.times.push_back(t);
      out.states.push_back(y);
      out.derivatives.push_back(k1);
      if (stop(t, y)) {
        out.stopped_early = t < t1;
        break;
      }
      const double factor = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
      h = std::min(h * factor, tol.max_step);
    } else {
      ++out.rejected_steps;
      h *= std::clamp(0.9 * std::pow(err, -0.2), 0.2, 1.0);
    }
  }
  return out;
}

/// Fixed-step propagation with the fifth-order weights; used to check the
/// convergence order of the tableau.
template <class State, class Rhs>
State integrate_fixed(Rhs f, double t0, const State& y0, double t1, std::size_t steps) {
  const double h = (t1 - t0) / static_cast<double>(steps);
  State y = y0;
  State k1 = f(t0, y);
  for (std::size_t n = 0; n < steps; ++n) {
    const double t = t0 + static_cast<double>(n) * h;
    auto step = detail::dopri_step<State>(f, t, y, k1, h);
    y = std::move(step.y);
    k1 = std::move(step.f);
  }
  return y;
}

}  // namespace pme::ode

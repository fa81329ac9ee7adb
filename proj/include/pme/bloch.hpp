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

// Two-level specialization: Bloch vectors, the affine velocity field
// r' = 2 Lambda r + b, and environment construction from a chosen fixed point.

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "pme/error.hpp"
#include "pme/lindblad.hpp"

namespace pme {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using CMat3 = Eigen::Matrix3cd;

inline constexpr double kBlochNormSlack = 1e-9;

struct BlochState {
  Vec3 r = Vec3::Zero();

  BlochState() = default;
  explicit BlochState(const Vec3& v) : r(v) {}
  BlochState(double r1, double r2, double r3) : r(r1, r2, r3) {}

  double norm() const { return r.norm(); }
  bool is_physical() const { return r.norm() <= 1.0 + kBlochNormSlack; }
};

/// r' = 2 * lambda * r + b.
struct AffineGenerator {
  Mat3 lambda = Mat3::Zero();
  Vec3 b = Vec3::Zero();

  Vec3 velocity(const Vec3& r) const { return 2.0 * lambda * r + b; }
};

namespace bloch {

inline const std::array<CMatrix, 3>& pauli() {
  static const std::array<CMatrix, 3> sigma = [] {
    const auto basis = lindblad::traceless_basis(2);
    return std::array<CMatrix, 3>{basis[0], basis[1], basis[2]};
  }();
  return sigma;
}

/// r_n = Tr(rho sigma_n). Also valid for traceless derivatives of rho.
inline Vec3 bloch_components(const CMatrix& m) {
  if (m.rows() != 2 || m.cols() != 2)
    throw Error(ErrorCode::DimensionMismatch, "Bloch map needs a 2x2 matrix");
  const auto& s = pauli();
  return Vec3((m * s[0]).trace().real(), (m * s[1]).trace().real(), (m * s[2]).trace().real());
}

inline BlochState bloch_map(const DensityMatrix& rho) { return BlochState(bloch_components(rho.matrix())); }

/// rho = (I + sum_n r_n sigma_n) / 2, without physicality checks.
inline CMatrix bloch_to_matrix(const Vec3& r) {
  const auto& s = pauli();
  CMatrix rho = 0.5 * CMatrix::Identity(2, 2);
  for (int n = 0; n < 3; ++n) rho += 0.5 * r(n) * s[n];
  return rho;
}

inline DensityMatrix density_from_bloch(const BlochState& state) {
  if (!state.is_physical())
    throw Error(ErrorCode::BlochNormExceeded, "|r| = " + std::to_string(state.norm()));
  return DensityMatrix(bloch_to_matrix(state.r));
}

/// Qubit environment with H = sum_n h_n sigma_n.
inline Environment qubit_environment(const CMat3& kossakowski, const Vec3& h) {
  const auto& s = pauli();
  CMatrix hamiltonian = CMatrix::Zero(2, 2);
  for (int n = 0; n < 3; ++n) hamiltonian += h(n) * s[n];
  return Environment(hamiltonian, CMatrix(kossakowski));
}

/// h_n = Tr(H sigma_n) / 2; any multiple of the identity in H drops out.
inline Vec3 hamiltonian_vector(const Environment& env) {
  if (env.dim() != 2) throw Error(ErrorCode::DimensionMismatch, "qubit environment required");
  return 0.5 * bloch_components(env.hamiltonian());
}

inline Mat3 lambda_matrix(const Mat3& c_real, const Vec3& h) {
  // c_real holds Re C_mn; only the symmetric real part enters.
  const double c11 = c_real(0, 0), c22 = c_real(1, 1), c33 = c_real(2, 2);
  const double re12 = c_real(0, 1), re23 = c_real(1, 2), re31 = c_real(2, 0);
  Mat3 lambda;
  lambda << -c22 - c33, -h(2) + re12, h(1) + re31,
             h(2) + re12, -c11 - c33, -h(0) + re23,
            -h(1) + re31, h(0) + re23, -c11 - c22;
  return lambda;
}

inline AffineGenerator build_affine(const Environment& env) {
  if (env.dim() != 2) throw Error(ErrorCode::DimensionMismatch, "affine Bloch form needs N = 2");
  const CMatrix& c = env.kossakowski();
  const Vec3 h = hamiltonian_vector(env);
  AffineGenerator gen;
  gen.lambda = lambda_matrix(c.real(), h);
  // C_23 = c(1,2), C_31 = c(2,0), C_12 = c(0,1).
  gen.b = -4.0 * Vec3(c(1, 2).imag(), c(2, 0).imag(), c(0, 1).imag());
  return gen;
}

inline Vec3 velocity(const BlochState& state, const AffineGenerator& gen) { return gen.velocity(state.r); }

/// Trace distance of two qubit states, half their Euclidean Bloch distance.
inline double trace_distance(const BlochState& a, const BlochState& b) { return 0.5 * (a.r - b.r).norm(); }

inline constexpr double kMaxConditionNumber = 1e12;

/// Ratio of largest to smallest singular value; infinite when singular.
inline double condition_number(const Mat3& m) {
  const Eigen::VectorXd sv = Eigen::JacobiSVD<Eigen::MatrixXd>(m).singularValues();
  return sv(2) > 0.0 ? sv(0) / sv(2) : std::numeric_limits<double>::infinity();
}

inline BlochState stationary_bloch(const AffineGenerator& gen) {
  if (condition_number(gen.lambda) > kMaxConditionNumber)
    throw Error(ErrorCode::SingularGenerator, "Lambda is singular or ill-conditioned");
  return BlochState(gen.lambda.fullPivLu().solve(-0.5 * gen.b));
}

inline constexpr double kPlaneTolerance = 1e-9;

/// Conditions under which r3 = 0 is invariant:
/// Im C_12 = -h_2 + Re C_31 = h_1 + Re C_23 = 0.
inline bool plane_condition_check(const Environment& env) {
  if (env.dim() != 2) throw Error(ErrorCode::DimensionMismatch, "plane condition needs N = 2");
  const CMatrix& c = env.kossakowski();
  const Vec3 h = hamiltonian_vector(env);
  return std::abs(c(0, 1).imag()) < kPlaneTolerance &&
         std::abs(-h(1) + c(2, 0).real()) < kPlaneTolerance &&
         std::abs(h(0) + c(1, 2).real()) < kPlaneTolerance;
}

/// Builds the environment whose fixed point is r_star: keeps the real parts
/// and diagonal of C, then sets Im(C_23, C_31, C_12) = -b/4 with
/// b = -2 Lambda r_star.
inline Environment environment_from_target(const Mat3& c_real, const Vec3& h, const BlochState& r_star) {
  const Mat3 sym = 0.5 * (c_real + c_real.transpose());
  const Mat3 lambda = lambda_matrix(sym, h);
  if (condition_number(lambda) > kMaxConditionNumber)
    throw Error(ErrorCode::SingularGenerator, "Lambda built from c_real and h is singular");

  const Vec3 b = -2.0 * lambda * r_star.r;
  const Vec3 im = -0.25 * b;
  const Complex i{0.0, 1.0};
  CMat3 c = sym.cast<Complex>();
  c(1, 2) = sym(1, 2) + i * im(0);
  c(2, 0) = sym(2, 0) + i * im(1);
  c(0, 1) = sym(0, 1) + i * im(2);
  c(2, 1) = std::conj(c(1, 2));
  c(0, 2) = std::conj(c(2, 0));
  c(1, 0) = std::conj(c(0, 1));

  Environment env = qubit_environment(c, h);
  lindblad::require_valid(env);
  return env;
}

}  // namespace bloch

using bloch::trace_distance;

}  // namespace pme

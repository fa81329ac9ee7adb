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

// Lindblad generators for an N-level system in first standard form
// (Hamiltonian + Kossakowski matrix over a traceless operator basis),
// the equivalent diagonal form, and the row-stacked Liouvillian.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "pme/error.hpp"

namespace pme {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

namespace tolerance {
inline constexpr double kHermitian = 1e-9;
inline constexpr double kPsd = 1e-9;
inline constexpr double kNullEigenvalue = 1e-9;
inline constexpr double kDensityTrace = 1e-10;
inline constexpr double kDensityHermitian = 1e-10;
inline constexpr double kDensityPsd = 1e-9;
}  // namespace tolerance

namespace lindblad {

/// Generalized Gell-Mann basis, normalized to Tr(F_a F_b) = 2 delta_ab.
///
/// Ordering: for each index pair j < k in lexicographic order the symmetric
/// element |j><k| + |k><j| followed by the antisymmetric element
/// -i|j><k| + i|k><j|; then the diagonal elements l = 1..N-1. For N = 2 this
/// yields exactly (sigma_1, sigma_2, sigma_3), which is the order the Bloch
/// formulas index into.
inline std::vector<CMatrix> traceless_basis(int n) {
  if (n < 2) throw Error(ErrorCode::DimensionMismatch, "dimension must be >= 2");
  std::vector<CMatrix> basis;
  basis.reserve(static_cast<std::size_t>(n * n - 1));
  const Complex i{0.0, 1.0};
  for (int j = 0; j < n; ++j) {
    for (int k = j + 1; k < n; ++k) {
      CMatrix sym = CMatrix::Zero(n, n);
      sym(j, k) = 1.0;
      sym(k, j) = 1.0;
      basis.push_back(std::move(sym));
      CMatrix anti = CMatrix::Zero(n, n);
      anti(j, k) = -i;
      anti(k, j) = i;
      basis.push_back(std::move(anti));
    }
  }
  for (int l = 1; l < n; ++l) {
    CMatrix diag = CMatrix::Zero(n, n);
    const double scale = std::sqrt(2.0 / (l * (l + 1.0)));
    for (int j = 0; j < l; ++j) diag(j, j) = scale;
    diag(l, l) = -scale * l;
    basis.push_back(std::move(diag));
  }
  return basis;
}

inline double hermiticity_deviation(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

inline CMatrix commutator(const CMatrix& a, const CMatrix& b) { return a * b - b * a; }
inline CMatrix anticommutator(const CMatrix& a, const CMatrix& b) { return a * b + b * a; }

inline CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

/// Row-stacking: element (i, j) of an N x N matrix lands at index i * N + j.
inline CVector vectorize_rows(const CMatrix& m) {
  CVector v(m.size());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) v(i * m.cols() + j) = m(i, j);
  return v;
}

inline CMatrix unvectorize_rows(const CVector& v, int n) {
  if (v.size() != static_cast<Eigen::Index>(n) * n)
    throw Error(ErrorCode::DimensionMismatch, "vector length is not N^2");
  CMatrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = v(i * n + j);
  return m;
}

/// One bath/quench setting: Hamiltonian H and Kossakowski matrix C over the
/// fixed traceless basis. Immutable once built; shape checks happen here,
/// physical checks (Hermiticity, positivity) in validate_environment.
class Environment {
 public:
  Environment(CMatrix hamiltonian, CMatrix kossakowski)
      : hamiltonian_(std::move(hamiltonian)), kossakowski_(std::move(kossakowski)) {
    const auto n = hamiltonian_.rows();
    if (n < 2 || hamiltonian_.cols() != n)
      throw Error(ErrorCode::DimensionMismatch, "Hamiltonian must be square with N >= 2");
    const auto m = n * n - 1;
    if (kossakowski_.rows() != m || kossakowski_.cols() != m)
      throw Error(ErrorCode::DimensionMismatch,
                  "Kossakowski matrix must be (N^2-1)x(N^2-1) = " + std::to_string(m));
    dim_ = static_cast<int>(n);
    basis_ = traceless_basis(dim_);
  }

  /// Zero generator (no dynamics) in dimension n.
  static Environment zero(int n) {
    return Environment(CMatrix::Zero(n, n), CMatrix::Zero(n * n - 1, n * n - 1));
  }

  int dim() const noexcept { return dim_; }
  const CMatrix& hamiltonian() const noexcept { return hamiltonian_; }
  const CMatrix& kossakowski() const noexcept { return kossakowski_; }
  const std::vector<CMatrix>& basis() const noexcept { return basis_; }

 private:
  int dim_ = 0;
  CMatrix hamiltonian_;
  CMatrix kossakowski_;
  std::vector<CMatrix> basis_;
};

struct ValidationReport {
  double hamiltonian_hermiticity = 0.0;
  double kossakowski_hermiticity = 0.0;
  double min_kossakowski_eigenvalue = 0.0;
  bool accepted = false;
  std::optional<ErrorCode> failure;
};

inline ValidationReport validate_generator(const CMatrix& hamiltonian, const CMatrix& kossakowski) {
  const auto n = hamiltonian.rows();
  if (n < 2 || hamiltonian.cols() != n || kossakowski.rows() != n * n - 1 ||
      kossakowski.cols() != n * n - 1)
    throw Error(ErrorCode::DimensionMismatch, "inconsistent generator shapes");

  ValidationReport report;
  report.hamiltonian_hermiticity = hermiticity_deviation(hamiltonian);
  report.kossakowski_hermiticity = hermiticity_deviation(kossakowski);
  // Eigenvalues of the Hermitian part; a non-Hermitian C is rejected anyway.
  const CMatrix herm = 0.5 * (kossakowski + kossakowski.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(herm, Eigen::EigenvaluesOnly);
  report.min_kossakowski_eigenvalue = eig.eigenvalues().minCoeff();

  if (report.hamiltonian_hermiticity >= tolerance::kHermitian ||
      report.kossakowski_hermiticity >= tolerance::kHermitian) {
    report.failure = ErrorCode::NonHermitian;
  } else if (report.min_kossakowski_eigenvalue < -tolerance::kPsd) {
    report.failure = ErrorCode::NonPositiveKossakowski;
  }
  report.accepted = !report.failure.has_value();
  return report;
}

inline ValidationReport validate_environment(const Environment& env) {
  return validate_generator(env.hamiltonian(), env.kossakowski());
}

inline void require_valid(const Environment& env) {
  const auto report = validate_environment(env);
  if (!report.accepted) {
    throw Error(*report.failure,
                "environment rejected (H herm dev " + std::to_string(report.hamiltonian_hermiticity) +
                    ", C herm dev " + std::to_string(report.kossakowski_hermiticity) +
                    ", min eig C " + std::to_string(report.min_kossakowski_eigenvalue) + ")");
  }
}

/// Density matrix with its physical invariants checked at construction.
class DensityMatrix {
 public:
  explicit DensityMatrix(CMatrix rho) : rho_(std::move(rho)) {
    if (rho_.rows() != rho_.cols() || rho_.rows() < 1)
      throw Error(ErrorCode::DimensionMismatch, "density matrix must be square");
    const double trace_dev = std::abs(rho_.trace() - Complex{1.0, 0.0});
    if (trace_dev > tolerance::kDensityTrace)
      throw Error(ErrorCode::InvalidState, "trace deviates from 1 by " + std::to_string(trace_dev));
    if (hermiticity_deviation(rho_) > tolerance::kDensityHermitian)
      throw Error(ErrorCode::InvalidState, "density matrix not Hermitian");
    if (min_eigenvalue() < -tolerance::kDensityPsd)
      throw Error(ErrorCode::InvalidState, "density matrix has a negative eigenvalue");
  }

  const CMatrix& matrix() const noexcept { return rho_; }
  int dim() const noexcept { return static_cast<int>(rho_.rows()); }

  double min_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(0.5 * (rho_ + rho_.adjoint()), Eigen::EigenvaluesOnly);
    return eig.eigenvalues().minCoeff();
  }

 private:
  CMatrix rho_;
};

/// Dissipator of the first standard form:
/// sum_mn C_mn (F_m rho F_n^dag - 1/2 {F_n^dag F_m, rho}).
inline CMatrix dissipator_first_form(const CMatrix& rho, const Environment& env) {
  const auto& basis = env.basis();
  const auto& c = env.kossakowski();
  CMatrix out = CMatrix::Zero(rho.rows(), rho.cols());
  for (std::size_t m = 0; m < basis.size(); ++m) {
    for (std::size_t n = 0; n < basis.size(); ++n) {
      const Complex cmn = c(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
      if (cmn == Complex{}) continue;
      const CMatrix fn_dag = basis[n].adjoint();
      out += cmn * (basis[m] * rho * fn_dag - 0.5 * anticommutator(fn_dag * basis[m], rho));
    }
  }
  return out;
}

inline CMatrix rhs_first_form(const CMatrix& rho, const Environment& env) {
  if (rho.rows() != env.dim() || rho.cols() != env.dim())
    throw Error(ErrorCode::DimensionMismatch, "state and environment dimensions differ");
  const Complex i{0.0, 1.0};
  return -i * commutator(env.hamiltonian(), rho) + dissipator_first_form(rho, env);
}

inline CMatrix rhs_first_form(const DensityMatrix& rho, const Environment& env) {
  return rhs_first_form(rho.matrix(), env);
}

struct DiagonalForm {
  std::vector<double> rates;
  std::vector<CMatrix> jumps;
};

/// Diagonalizes C = V diag(gamma) V^dag; the jump operators are
/// L_j = sum_m V_mj F_m so that the diagonal form reproduces the first form.
/// Eigenvalues in [-tol_psd, 0) are clamped to zero.
inline DiagonalForm diagonalize_kossakowski(const Environment& env) {
  require_valid(env);
  const CMatrix herm = 0.5 * (env.kossakowski() + env.kossakowski().adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(herm);
  const auto& basis = env.basis();
  DiagonalForm form;
  for (Eigen::Index j = 0; j < eig.eigenvalues().size(); ++j) {
    double rate = eig.eigenvalues()(j);
    if (rate < -tolerance::kPsd)
      throw Error(ErrorCode::NonPositiveKossakowski, "negative Kossakowski eigenvalue");
    rate = std::max(rate, 0.0);
    CMatrix jump = CMatrix::Zero(env.dim(), env.dim());
    for (std::size_t m = 0; m < basis.size(); ++m)
      jump += eig.eigenvectors()(static_cast<Eigen::Index>(m), j) * basis[m];
    form.rates.push_back(rate);
    form.jumps.push_back(std::move(jump));
  }
  return form;
}

inline CMatrix dissipator_diagonal_form(const CMatrix& rho, const DiagonalForm& form) {
  CMatrix out = CMatrix::Zero(rho.rows(), rho.cols());
  for (std::size_t j = 0; j < form.rates.size(); ++j) {
    if (form.rates[j] == 0.0) continue;
    const CMatrix& l = form.jumps[j];
    const CMatrix l_dag = l.adjoint();
    out += form.rates[j] * (l * rho * l_dag - 0.5 * anticommutator(l_dag * l, rho));
  }
  return out;
}

inline CMatrix rhs_diagonal_form(const CMatrix& rho, const CMatrix& hamiltonian, const DiagonalForm& form) {
  const Complex i{0.0, 1.0};
  return -i * commutator(hamiltonian, rho) + dissipator_diagonal_form(rho, form);
}

/// Superoperator acting on row-stacked density matrices, built with
/// vec(A B C) = (A kron C^T) vec(B).
struct Liouvillian {
  CMatrix matrix;
  int dim = 0;

  CMatrix apply(const CMatrix& rho) const {
    return unvectorize_rows(matrix * vectorize_rows(rho), dim);
  }
};

inline Liouvillian build_liouvillian(const Environment& env) {
  const int n = env.dim();
  const CMatrix id = CMatrix::Identity(n, n);
  const Complex i{0.0, 1.0};
  const CMatrix& h = env.hamiltonian();
  CMatrix l = -i * (kron(h, id) - kron(id, h.transpose()));
  const auto& basis = env.basis();
  const auto& c = env.kossakowski();
  for (std::size_t m = 0; m < basis.size(); ++m) {
    for (std::size_t k = 0; k < basis.size(); ++k) {
      const Complex cmk = c(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(k));
      if (cmk == Complex{}) continue;
      const CMatrix fk_dag = basis[k].adjoint();
      const CMatrix prod = fk_dag * basis[m];
      l += cmk * (kron(basis[m], fk_dag.transpose()) - 0.5 * kron(prod, id) -
                  0.5 * kron(id, prod.transpose()));
    }
  }
  return Liouvillian{std::move(l), n};
}

/// Unique steady state from the null eigenvector of the Liouvillian.
inline DensityMatrix steady_state(const Liouvillian& liouvillian) {
  Eigen::ComplexEigenSolver<CMatrix> eig(liouvillian.matrix);
  if (eig.info() != Eigen::Success)
    throw Error(ErrorCode::DegenerateSteadyState, "Liouvillian eigensolver failed");
  const auto& values = eig.eigenvalues();
  Eigen::Index null_index = -1;
  int null_count = 0;
  for (Eigen::Index k = 0; k < values.size(); ++k) {
    if (std::abs(values(k)) < tolerance::kNullEigenvalue) {
      ++null_count;
      null_index = k;
    }
  }
  if (null_count != 1)
    throw Error(ErrorCode::DegenerateSteadyState,
                std::to_string(null_count) + " Liouvillian eigenvalues within tolerance of zero");
  CMatrix rho = unvectorize_rows(eig.eigenvectors().col(null_index), liouvillian.dim);
  rho /= rho.trace();
  rho = 0.5 * (rho + rho.adjoint());
  return DensityMatrix(std::move(rho));
}

inline DensityMatrix steady_state(const Environment& env) {
  require_valid(env);
  return steady_state(build_liouvillian(env));
}

}  // namespace lindblad

using lindblad::DensityMatrix;
using lindblad::Environment;

}  // namespace pme

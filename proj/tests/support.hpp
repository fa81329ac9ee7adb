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

#include <complex>
#include <random>
#include <string>

#include "pme/io/config.hpp"
#include "pme/pme.hpp"

namespace pme::test_support {

inline std::string config_path(const std::string& name) { return std::string(PME_CONFIG_DIR) + "/" + name + ".config"; }

inline io::ScenarioConfig fixture(const std::string& name) { return io::load_config(config_path(name)); }

inline protocol::Scenario scenario(const std::string& name) { return io::to_scenario(fixture(name)); }

inline const std::vector<std::string>& fixture_names() {
  static const std::vector<std::string> names{"fig1", "fig2a", "fig2b", "fig2c", "figA1"};
  return names;
}

/// Random positive semidefinite C = G G^dagger with entries of order `scale`.
inline CMatrix random_kossakowski(std::mt19937_64& rng, int n, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, 1.0);
  const int m = n * n - 1;
  CMatrix a(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) a(i, j) = Complex(g(rng), g(rng));
  return scale * (a * a.adjoint()) / static_cast<double>(m);
}

inline CMatrix random_hermitian(std::mt19937_64& rng, int n, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, 1.0);
  CMatrix a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = Complex(g(rng), g(rng));
  return scale * 0.5 * (a + a.adjoint());
}

inline Environment random_environment(std::mt19937_64& rng, int n = 2, double scale = 1.0) {
  return Environment(random_hermitian(rng, n, scale), random_kossakowski(rng, n, scale));
}

inline Environment random_qubit_environment(std::mt19937_64& rng, double h3_scale = 1.0) {
  std::normal_distribution<double> g(0.0, 1.0);
  const Vec3 h(g(rng), g(rng), h3_scale * g(rng));
  return bloch::qubit_environment(random_kossakowski(rng, 2), h);
}

/// Uniform point of the closed Bloch ball.
inline BlochState random_bloch(std::mt19937_64& rng, double radius = 1.0) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Vec3 d(g(rng), g(rng), g(rng));
  d.normalize();
  return BlochState(radius * std::cbrt(u(rng)) * d);
}

/// Random full-rank density matrix of dimension n.
inline DensityMatrix random_density(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> g(0.0, 1.0);
  CMatrix a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = Complex(g(rng), g(rng));
  CMatrix rho = a * a.adjoint();
  rho /= rho.trace().real();
  return DensityMatrix(0.5 * (rho + rho.adjoint()));
}

}  // namespace pme::test_support

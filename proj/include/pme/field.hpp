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

// Velocity field sampled over the r1-r2 unit disk (r3 = 0).

#include <Eigen/Dense>

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "pme/bloch.hpp"
#include "pme/error.hpp"
#include "pme/lindblad.hpp"

namespace pme::field {

using Vec2 = Eigen::Vector2d;

inline constexpr int kDefaultResolution = 41;
inline constexpr double kDiskSlack = 1e-12;

struct FieldGrid {
  int resolution = 0;
  std::vector<Vec2> points;
  std::vector<Vec2> vectors;
  std::vector<double> magnitudes;
  std::string env_id;
  AffineGenerator generator;
  std::vector<int> cell_index;  // resolution^2 entries, -1 outside the disk

  double spacing() const { return 2.0 / (resolution - 1); }

  /// Unit direction of the field, zero where the field vanishes.
  Vec2 direction(std::size_t i) const {
    return magnitudes[i] > 0.0 ? Vec2(vectors[i] / magnitudes[i]) : Vec2::Zero();
  }
};

inline double axis_coordinate(int i, int resolution) { return -1.0 + 2.0 * i / (resolution - 1); }

/// Uniform grid on [-1, 1]^2, masked to the closed unit disk.
inline FieldGrid field_grid(const Environment& env, int resolution = kDefaultResolution, std::string env_id = {}) {
  lindblad::require_valid(env);
  if (resolution < 2) throw Error(ErrorCode::ConfigError, "resolution must be at least 2");
  if (!bloch::plane_condition_check(env))
    throw Error(ErrorCode::PlaneViolation, "environment does not keep r3 = 0 invariant");

  FieldGrid grid;
  grid.resolution = resolution;
  grid.env_id = std::move(env_id);
  grid.generator = bloch::build_affine(env);
  grid.cell_index.assign(static_cast<std::size_t>(resolution * resolution), -1);
  for (int i = 0; i < resolution; ++i) {
    for (int j = 0; j < resolution; ++j) {
      const double r1 = axis_coordinate(i, resolution);
      const double r2 = axis_coordinate(j, resolution);
      if (r1 * r1 + r2 * r2 > 1.0 + kDiskSlack) continue;
      const Vec3 v = grid.generator.velocity(Vec3(r1, r2, 0.0));
      grid.cell_index[static_cast<std::size_t>(i * resolution + j)] = static_cast<int>(grid.points.size());
      grid.points.emplace_back(r1, r2);
      grid.vectors.emplace_back(v(0), v(1));
      grid.magnitudes.push_back(std::hypot(v(0), v(1)));
    }
  }
  return grid;
}

/// Bilinear interpolation of the sampled vectors; empty when the enclosing
/// cell is not fully inside the disk.
inline std::optional<Vec2> sample_bilinear(const FieldGrid& grid, const Vec2& at) {
  const double h = grid.spacing();
  const double fx = (at(0) + 1.0) / h, fy = (at(1) + 1.0) / h;
  const int i = static_cast<int>(std::floor(fx)), j = static_cast<int>(std::floor(fy));
  if (i < 0 || j < 0 || i + 1 >= grid.resolution || j + 1 >= grid.resolution) return std::nullopt;

  auto lookup = [&grid](int a, int b) -> std::optional<Vec2> {
    const int k = grid.cell_index[static_cast<std::size_t>(a * grid.resolution + b)];
    if (k < 0) return std::nullopt;
    return grid.vectors[static_cast<std::size_t>(k)];
  };
  const auto v00 = lookup(i, j), v10 = lookup(i + 1, j), v01 = lookup(i, j + 1), v11 = lookup(i + 1, j + 1);
  if (!v00 || !v10 || !v01 || !v11) return std::nullopt;
  const double sx = fx - i, sy = fy - j;
  return Vec2((1 - sx) * (1 - sy) * *v00 + sx * (1 - sy) * *v10 + (1 - sx) * sy * *v01 + sx * sy * *v11);
}

}  // namespace pme::field

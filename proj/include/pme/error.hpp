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

#include <stdexcept>
#include <string>
#include <string_view>

namespace pme {

enum class ErrorCode {
  DimensionMismatch,
  NonHermitian,
  NonPositiveKossakowski,
  InvalidState,
  DegenerateSteadyState,
  SteadyStateMismatch,
  BlochNormExceeded,
  SingularGenerator,
  StepSizeUnderflow,
  DegenerateReference,
  NoConvergence,
  PlaneViolation,
  InvalidSwitchTime,
  ConfigError,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NonHermitian: return "NonHermitian";
    case ErrorCode::NonPositiveKossakowski: return "NonPositiveKossakowski";
    case ErrorCode::InvalidState: return "InvalidState";
    case ErrorCode::DegenerateSteadyState: return "DegenerateSteadyState";
    case ErrorCode::SteadyStateMismatch: return "SteadyStateMismatch";
    case ErrorCode::BlochNormExceeded: return "BlochNormExceeded";
    case ErrorCode::SingularGenerator: return "SingularGenerator";
    case ErrorCode::StepSizeUnderflow: return "StepSizeUnderflow";
    case ErrorCode::DegenerateReference: return "DegenerateReference";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::PlaneViolation: return "PlaneViolation";
    case ErrorCode::InvalidSwitchTime: return "InvalidSwitchTime";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

/// Single exception type for the library; `code()` tells callers what failed.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace pme

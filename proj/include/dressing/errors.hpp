// Copyright 2026 The dressing-sim Authors
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

namespace dressing {

/// Base class for all library errors.
struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Violated preconditions on otherwise well-formed inputs (CLI exit code 3).
struct DomainError : Error {
  using Error::Error;
};

/// Numerical failures at runtime (CLI exit code 4).
struct NumericError : Error {
  using Error::Error;
};

/// Malformed files or rows (CLI exit code 2).
struct ParseError : Error {
  using Error::Error;
};

// geometry
struct LengthMismatch : DomainError {
  using DomainError::DomainError;
};
struct DegeneratePosture : DomainError {
  using DomainError::DomainError;
};

// estimator
struct DegenerateTrajectory : DomainError {
  using DomainError::DomainError;
};
struct PathStartMismatch : DomainError {
  using DomainError::DomainError;
};
struct SingularJacobian : NumericError {
  using NumericError::NumericError;
};
struct UnreachableHand : NumericError {
  using NumericError::NumericError;
};
struct ConvergenceFailure : NumericError {
  using NumericError::NumericError;
};

// dressing frame
struct ArcTooLarge : DomainError {
  using DomainError::DomainError;
};
struct AmbiguousProjection : DomainError {
  using DomainError::DomainError;
};
struct OutOfRange : DomainError {
  using DomainError::DomainError;
};
struct PathDoesNotCrossElbow : DomainError {
  using DomainError::DomainError;
};

// policy
struct InsufficientData : DomainError {
  using DomainError::DomainError;
};
struct DegenerateComponent : NumericError {
  using NumericError::NumericError;
};
struct NumericalUnderflow : NumericError {
  using NumericError::NumericError;
};

}  // namespace dressing

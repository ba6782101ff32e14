// Copyright (c) hinfgc contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace hinf {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-finite entries, dimension mismatches, out-of-range parameters.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// A matrix that was required to be positive semi-definite is not.
class NotPsd : public Error {
 public:
  using Error::Error;
};

/// Cholesky factorization met a non-positive pivot.
class SingularSystem : public Error {
 public:
  using Error::Error;
};

/// An iterative eigenvalue routine failed to converge.
class ConvergenceFailure : public Error {
 public:
  using Error::Error;
};

/// A modelling assumption on the plant does not hold (e.g. CᵀD ≠ 0).
class AssumptionViolation : public Error {
 public:
  using Error::Error;
};

/// Vertex enumeration would exceed the configured cap.
class CapacityError : public Error {
 public:
  using Error::Error;
};

/// The W₁ block is too ill-conditioned to recover a gain from it.
class ExtractionError : public Error {
 public:
  using Error::Error;
};

/// A problem, gain or report file does not match its schema.
class SchemaError : public Error {
 public:
  using Error::Error;
};

}  // namespace hinf

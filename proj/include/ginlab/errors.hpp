// Copyright 2025 The ginlab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace ginlab {

/// Caller supplied arguments that violate a precondition.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A spectral sum or logarithm hit a pole.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Linear algebra or quadrature failed to deliver the requested accuracy.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what, double partial = 0.0)
      : std::runtime_error(what), partial_(partial) {}
  [[nodiscard]] double partial_value() const noexcept { return partial_; }

 private:
  double partial_;
};

/// Request exceeds a configured symbolic or memory budget.
class CapacityError : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// Unreadable or malformed input file.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Experiment configuration inconsistent with the requested regime.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Asymptotic evaluator called outside its validity regime.
class RegimeError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace ginlab

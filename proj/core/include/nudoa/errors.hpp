// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace nudoa {

/// Input outside the mathematical domain of an operation (bad angle,
/// non-positive variance, inconsistent dimensions).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical routine could not produce a trustworthy result.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what, double residual = 0.0)
      : std::runtime_error(what), residual_(residual) {}

  /// Residual (or other diagnostic magnitude) reached before giving up.
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// Configuration file or command line could not be turned into a scenario.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace nudoa

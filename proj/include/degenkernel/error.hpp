// SPDX-License-Identifier: MIT
#pragma once

#include <stdexcept>
#include <string>

namespace degenkernel {

/// Argument outside the mathematical domain, or a validation failure of the
/// coefficient hypotheses. CLI exit code 2.
class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A series, root finder or quadrature failed to reach its tolerance.
/// CLI exit code 3.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed command line or configuration. CLI exit code 1.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace degenkernel

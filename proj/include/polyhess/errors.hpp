#pragma once

#include <stdexcept>
#include <string>

namespace polyhess {

/// Argument outside the mathematical domain of an operation (k out of range, bad dimension, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A caller broke a documented precondition (ghost width too small, mismatched grids, ...).
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// The operation is well posed but outside what this build supports (e.g. N > 3 grids).
class CapabilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Mountain-pass geometry could not be established or was lost during a solve.
/// Usually means |lambda| is too large for the chosen datum.
class GeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent run configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace polyhess

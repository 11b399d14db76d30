#pragma once

#include <stdexcept>
#include <string>

namespace wavecrn {

/// Invalid user-supplied configuration (radius, tolerances, config files).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A state or matrix whose dimensions do not match the index set it is used with.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An argument outside the mathematical domain of an operation
/// (non-positive densities for a logarithm, a degenerate lattice, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Too few data points for a fit or diagnostic.
class InsufficientDataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace wavecrn

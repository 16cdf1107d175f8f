#pragma once

#include <stdexcept>
#include <string>

namespace ldbm {

/// Argument outside the mathematical domain of an operation (r < 0, gamma >= 2, x = 0, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A caller broke a documented precondition (grid mismatch, provenance mismatch, start outside domain).
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Layer index or clock reading outside the available range.
class IndexError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Floating point failure: factorization breakdown, nonfinite path values.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Requested radii or bins finer than the grid can resolve.
class ResolutionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace ldbm

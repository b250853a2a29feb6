#pragma once

#include <stdexcept>
#include <string>

namespace ctpt {

// Invalid argument or out-of-domain parameter (gamma <= 0, nu <= 2, ...).
class DomainError : public std::invalid_argument {
public:
  explicit DomainError(const std::string& what) : std::invalid_argument(what) {}
};

// Model/data preconditions: rank deficiency, n <= k, degenerate response,
// malformed inputs from files.
class ValidationError : public std::runtime_error {
public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// Numerical failure: quadrature budget exhausted, degenerate covariance,
// non-finite log posterior at the chain start.
class NumericalError : public std::runtime_error {
public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

// File open/read/write failures.
class IoError : public std::runtime_error {
public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace ctpt

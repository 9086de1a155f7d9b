#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace losstail {

/// Invalid parameter vector for a distribution family.
class ParameterDomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Argument outside the domain of an operation (probability outside (0,1),
/// rank out of range, mismatched lengths, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A cdf value of exactly 0 or 1 was hit where a logarithm is required.
class LogDomainError : public std::domain_error {
 public:
  LogDomainError(std::size_t index, const std::string& what)
      : std::domain_error(what), index_(index) {}

  /// 1-based rank of the offending observation.
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

class ModelInvalidError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class NumericFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class FitFailedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed user input (CSV rows, config files, flags).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace losstail

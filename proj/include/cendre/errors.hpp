#pragma once

#include <stdexcept>
#include <string>

namespace cendre {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A pivot, denominator or factorization collapsed.
class SingularityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operation called in a state where it is not defined (e.g. interval bounds
/// of an uncensored term).
class UsageError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Invalid experiment configuration or dataset layout. `field` names the
/// offending key when one is known.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& what)
      : std::runtime_error(field.empty() ? what : field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cendre

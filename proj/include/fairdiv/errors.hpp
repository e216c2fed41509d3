#pragma once

#include <stdexcept>
#include <string>

namespace fairdiv {

/// Argument outside the mathematical domain of an operation (x outside [0,1], ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A documented precondition of an operation does not hold.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Brute-force enumeration refused because the search space is too large.
class SizeError : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// Invalid experiment configuration; carries the offending field name.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& what)
      : std::runtime_error(key.empty() ? what : key + ": " + what), key_(std::move(key)) {}

  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace fairdiv

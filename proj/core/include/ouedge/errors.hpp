#pragma once

#include <stdexcept>
#include <string>

namespace ouedge {

// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

// Malformed or schema-violating experiment configuration.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// The requested computation needs a non-degenerate limit variance.
class DegenerateModelError : public std::runtime_error {
 public:
  explicit DegenerateModelError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace ouedge

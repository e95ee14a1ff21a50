#pragma once

#include <stdexcept>
#include <string>

namespace qbench {

/// Thrown when a numeric argument lies outside the domain of an operation
/// (negative drift, tau outside [0,1], bad density, ...).
class DomainError : public std::domain_error {
 public:
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

/// Thrown when configuration documents disagree with each other or with the
/// registry they refer to (length mismatches, unknown solver names, ...).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace qbench

#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>

namespace qwi {

// Malformed potential or structure parameters.
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(const std::string& what, std::optional<std::size_t> index = std::nullopt)
      : std::invalid_argument(what), index_(index) {}

  std::optional<std::size_t> index() const { return index_; }

 private:
  std::optional<std::size_t> index_;
};

// Energy (or position) outside the regime an operation is defined for.
class DomainError : public std::domain_error {
 public:
  explicit DomainError(const std::string& what,
                       double energy = std::numeric_limits<double>::quiet_NaN())
      : std::domain_error(what), energy_(energy) {}

  double energy() const { return energy_; }

 private:
  double energy_;
};

// Z = -z in a reflection amplitude: the denominator vanishes.
class PoleError : public DomainError {
 public:
  using DomainError::DomainError;
};

// A computed result failed its own self-check.
class ConsistencyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qwi

#pragma once

#include <stdexcept>
#include <string>

namespace bouss {

/// Invalid grid, scheme, or run configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the domain of a formula (pole, k = 0, singular P(k), ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Input data violates a property it is required to have (nonzero-mean u1,
/// negative log argument, broken conjugation symmetry, ...).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A scattering solve grew beyond representable range or failed to settle
/// under step refinement.
class ConditioningError : public std::runtime_error {
 public:
  ConditioningError(const std::string& what, double growth)
      : std::runtime_error(what), growth_(growth) {}
  double growth() const noexcept { return growth_; }

 private:
  double growth_;
};

/// A required input that cannot be derived internally was not supplied.
class MissingInputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace bouss

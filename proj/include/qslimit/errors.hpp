#pragma once

#include <stdexcept>
#include <string>

namespace qsl {

/// Argument outside the mathematical domain of an operation (u outside [0,1], p < 0, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A caller-asserted precondition does not hold for the supplied data.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A GridFunction or other value type was built with inconsistent contents.
class ContractViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The requested representation does not exist for this law (e.g. the density of a point mass).
class UnsupportedRepresentation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Too much probability mass left the finite x-domain.
class TruncationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The request exceeds a documented resource cap.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qsl

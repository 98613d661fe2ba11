#pragma once

#include <stdexcept>
#include <string>

namespace katzforge {

/// A document could not be parsed. The message carries line/field context.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A game instance violates a standing assumption or a structural invariant.
class InvalidInstance : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An allocation profile is outside the feasible set, or is not strictly
/// substochastic so that the walk series does not converge.
class InfeasibleProfile : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Matrix/vector dimensions do not agree with the instance.
class DimensionMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace katzforge

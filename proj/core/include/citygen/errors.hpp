#pragma once

#include <stdexcept>
#include <string>

namespace citygen {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input bytes are not well-formed in the declared format.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Input is well-formed but violates a domain invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class NotARoadPatch : public Error {
 public:
  using Error::Error;
};

class InvalidParam : public Error {
 public:
  using Error::Error;
};

/// land_value asked about a patch outside its domain (water or unserviced).
class ValueDomainError : public Error {
 public:
  using Error::Error;
};

}  // namespace citygen

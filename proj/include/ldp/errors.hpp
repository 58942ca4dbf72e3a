#pragma once

#include <stdexcept>
#include <string>

namespace ldp {

// Base class for everything thrown by this library, so callers can catch
// one type at the CLI boundary and print the message.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Input value outside its declared domain (numeric out of [-1,1] after
// normalization, categorical not an integer in 1..k, epsilon <= 0, ...).
class DomainViolation : public Error {
 public:
  using Error::Error;
};

// Attribute kind does not match the operation (numeric mechanism applied
// to a categorical attribute or vice versa).
class KindMismatch : public Error {
 public:
  using Error::Error;
};

// Tuple length, vector length, or matrix dimension disagrees with the schema.
class LengthMismatch : public Error {
 public:
  using Error::Error;
};

// Malformed schema file, report row, config line, or CSV record.
class ParseError : public Error {
 public:
  using Error::Error;
};

// An aggregate or estimate was requested from zero reports.
class EmptyInput : public Error {
 public:
  using Error::Error;
};

// A categorical report arrived but no projection matrix was registered
// for that attribute.
class MissingMatrix : public Error {
 public:
  using Error::Error;
};

// Parameter combination that collapses a formula (k = 0, n = 0, beta
// outside (0,1), raw_min == raw_max, ...).
class DegenerateParams : public Error {
 public:
  using Error::Error;
};

// Request exceeds a hard size limit rather than a semantic rule.
class TooLarge : public Error {
 public:
  using Error::Error;
};

// Doubling construction or size computation left the supported range.
class Overflow : public Error {
 public:
  using Error::Error;
};

// Not enough data to perform the requested split or fold.
class InsufficientData : public Error {
 public:
  using Error::Error;
};

// Invalid experiment or training configuration.
class SpecError : public Error {
 public:
  using Error::Error;
};

}  // namespace ldp

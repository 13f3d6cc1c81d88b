#pragma once

#include <stdexcept>
#include <string>

namespace netscore {

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed input document (JSON syntax, wrong field type, unknown field).
/// The message carries the byte position when the underlying parser knows it.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Structurally valid input that violates a semantic rule. The message names
/// the offending layer or record and the rule that failed.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Registry merge under the reject_conflicts policy found colliding names.
class MergeConflictError : public Error {
 public:
  using Error::Error;
};

/// A simulation or enumeration was asked to run past its size guard.
class SizeLimitError : public Error {
 public:
  using Error::Error;
};

}  // namespace netscore

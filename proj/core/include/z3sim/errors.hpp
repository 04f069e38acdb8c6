// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>

namespace z3sim {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Invalid argument values or malformed domain objects.
class ValidationError : public Error {
  public:
    using Error::Error;
};

/// Malformed input text (channel files, config files); the message names the offending line or key.
class ParseError : public Error {
  public:
    using Error::Error;
};

/// Index outside the valid range.
class BoundsError : public Error {
  public:
    using Error::Error;
};

/// A vanishing denominator: zero-energy saturated set, zero SNDR denominator.
class SingularityError : public Error {
  public:
    using Error::Error;
};

/// Estimates that contradict each other, e.g. a Bussgang gain paired with the wrong ensemble.
class InconsistencyError : public Error {
  public:
    using Error::Error;
};

/// Filesystem failures.
class IoError : public Error {
  public:
    using Error::Error;
};

}  // namespace z3sim

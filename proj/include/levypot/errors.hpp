#pragma once

#include <stdexcept>
#include <string>

namespace levypot {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid argument: out-of-range index, malformed set, start outside domain.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// A construction certificate could not be produced (e.g. no off-H basis).
class ConstructionError : public Error {
 public:
  using Error::Error;
};

/// An operation was called outside the regime where its claim is proved.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Truncation dimension too small for the requested depth.
class RangeError : public Error {
 public:
  using Error::Error;
};

/// Monte Carlo standard error fails to shrink with the sample size.
class IntegrabilityError : public Error {
 public:
  using Error::Error;
};

class InstabilityError : public Error {
 public:
  using Error::Error;
};

/// Hypothesis surrogate of a diagnostic not met by the supplied triplet.
class HypothesisError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace levypot

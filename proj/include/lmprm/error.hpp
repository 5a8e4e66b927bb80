#pragma once

#include <stdexcept>
#include <string>

namespace lmprm {

// Base for all library failures. The CLI maps subclasses to exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Malformed, truncated or corrupted artifact file (bad magic, version, CRC).
class FormatError : public Error {
 public:
  using Error::Error;
};

// A landmark table was paired with a graph it was not built from.
class FingerprintMismatch : public Error {
 public:
  using Error::Error;
};

// Rejection sampling exhausted its budget; free space is (nearly) empty.
class SamplingFailure : public Error {
 public:
  using Error::Error;
};

// Intensity calibration could not bracket the requested clear probability.
class CalibrationFailure : public Error {
 public:
  using Error::Error;
};

class UnknownObjective : public Error {
 public:
  using Error::Error;
};

}  // namespace lmprm

#pragma once

#include <stdexcept>
#include <string>

namespace passim {

/// Base for every error raised by the library. The CLI maps the concrete
/// type to a process exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual int exit_code() const noexcept = 0;
};

/// Malformed input: dimension or domain mismatch, bad config, bad file content.
class InvalidInput : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 2; }
};

class IoError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 3; }
};

/// Non-finite rates, failed fits, enumeration limits.
class NumericError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 4; }
};

}  // namespace passim

#pragma once

#include <stdexcept>
#include <string>

namespace oldroyd {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SizeMismatch : public Error {
 public:
  using Error::Error;
};

/// A negative-order operator was applied to a field whose k = 0 mode is not zero.
class MeanNotZero : public Error {
 public:
  using Error::Error;
};

class ZeroMode : public Error {
 public:
  ZeroMode() : Error("operation undefined at wavenumber k = 0") {}
};

class EmptySupport : public Error {
 public:
  EmptySupport() : Error("spectral support is empty") {}
};

class NonPositiveSeries : public Error {
 public:
  using Error::Error;
};

/// Advective stability bound dt * max|u| / h <= cfl_limit was breached.
class CflViolation : public Error {
 public:
  CflViolation(double cfl, double limit)
      : Error("CFL number " + std::to_string(cfl) + " exceeds limit " +
              std::to_string(limit)),
        cfl_(cfl) {}
  double cfl() const noexcept { return cfl_; }

 private:
  double cfl_;
};

class NonFinite : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class ParseError : public ConfigError {
 public:
  ParseError(int line, const std::string& what)
      : ConfigError("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

class UnknownKey : public ConfigError {
 public:
  UnknownKey(int line, const std::string& key)
      : ConfigError("line " + std::to_string(line) + ": unknown key '" + key + "'"),
        key_(key),
        line_(line) {}
  const std::string& key() const noexcept { return key_; }
  int line() const noexcept { return line_; }

 private:
  std::string key_;
  int line_;
};

class OutOfRange : public ConfigError {
 public:
  OutOfRange(const std::string& key, const std::string& why)
      : ConfigError("value of '" + key + "' out of range: " + why), key_(key) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

class BadPreset : public ConfigError {
 public:
  explicit BadPreset(const std::string& name)
      : ConfigError("unknown initial-data preset '" + name + "'") {}
};

}  // namespace oldroyd

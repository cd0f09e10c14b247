// SPDX-License-Identifier: Apache-2.0
#ifndef UNSATCACHE_ERRORS_HPP
#define UNSATCACHE_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace unsatcache {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A substitution image would be captured by an enclosing binder; the
/// caller must alpha-rename binders first.
class CaptureError : public Error {
 public:
  using Error::Error;
};

/// Two rename sources map to the same target.
class NonInjectiveError : public Error {
 public:
  using Error::Error;
};

class SortError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& message)
      : Error("parse error at " + std::to_string(line) + ":" + std::to_string(column) +
              ": " + message),
        line_(line),
        column_(column) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

class UnsupportedFeatureError : public Error {
 public:
  explicit UnsupportedFeatureError(const std::string& feature)
      : Error("unsupported feature: " + feature), feature_(feature) {}

  const std::string& feature() const { return feature_; }

 private:
  std::string feature_;
};

class WidthMismatchError : public Error {
 public:
  using Error::Error;
};

class SizeGuardError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class EmptySuiteError : public Error {
 public:
  using Error::Error;
};

class SolverCrashError : public Error {
 public:
  using Error::Error;
};

/// Scripted-oracle lookup for a formula that is not in the manifest.
class ManifestMissError : public Error {
 public:
  using Error::Error;
};

}  // namespace unsatcache

#endif

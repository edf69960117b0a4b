#pragma once

#include <stdexcept>
#include <string>

namespace alq {

/// Bad input: malformed parameters, files or arguments. Maps to CLI exit code 1.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

/// A mathematical invariant failed at runtime. Maps to CLI exit code 2.
class InvariantError : public std::runtime_error {
 public:
  explicit InvariantError(const std::string& what) : std::runtime_error(what) {}
};

/// File system or stream failure. Maps to CLI exit code 3.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace alq

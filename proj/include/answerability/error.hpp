#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace answerability {

// Base for every error raised by the toolkit. Carries the name of the module
// that raised it so the CLI can report "<module>: <message>".
class Error : public std::runtime_error {
 public:
  Error(std::string module, const std::string& message)
      : std::runtime_error(module + ": " + message), module_(std::move(module)), detail_(message) {}

  const std::string& module() const noexcept { return module_; }
  // The message without the module prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  std::string module_;
  std::string detail_;
};

// Bad input data or configuration; CLI exit status 1.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// A caller violated an operation's precondition.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// File could not be opened, read or written; CLI exit status 2.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace answerability

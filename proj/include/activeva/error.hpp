#pragma once

#include <stdexcept>
#include <string>

namespace activeva {

/// Invalid input to a library operation (dimension mismatch, bad value).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed external file (CSV, JSON sidecar, model artifact).
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operation not allowed in the current interview state.
class SessionError : public std::logic_error {
 public:
  enum class Kind { out_of_order, already_stopped, not_stopped };

  SessionError(Kind kind, const std::string& what) : std::logic_error(what), kind_(kind) {}

  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

}  // namespace activeva

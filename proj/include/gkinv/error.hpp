#pragma once

#include <stdexcept>
#include <string>

namespace gkinv {

// Raised when an operation's precondition fails on well-formed input.
class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised by the JSON readers; `pointer` names the offending key.
class SchemaError : public DomainError {
 public:
  SchemaError(std::string pointer, const std::string& what)
      : DomainError(pointer + ": " + what), pointer_(std::move(pointer)) {}

  const std::string& pointer() const noexcept { return pointer_; }

 private:
  std::string pointer_;
};

}  // namespace gkinv

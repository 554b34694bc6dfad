#pragma once

#include <stdexcept>
#include <string>

namespace hypertopic {

enum class ErrorKind {
  EmptySupport,
  DimensionMismatch,
  InvalidParams,
  SizeGuard,
  NonFiniteLoss,
  NonFiniteGradient,
  NonFiniteObjective,
  InfeasibleTarget,
  ShapeMismatch,
  RankDeficient,
  ConfigInvalid,
  ParseError,
};

const char* to_string(ErrorKind kind);

/// Single exception type for the library; `kind()` drives CLI exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace hypertopic

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace scarlet {

enum class ErrorCode {
  InvalidInput,
  InvalidConfig,
  DimensionMismatch,
  OracleUnavailable,
  ProtocolError,
  DegenerateDesign,
  SingularDesign,
  RankParseError,
  SynthesisParseError,
  InsufficientSeparation,
  EmptyContext,
  InvalidGain,
  NonFiniteLoss,
  MissingInput,
  SchemaError,
};

std::string_view to_string(ErrorCode code);

/// Exception carrying a machine-readable code. `context` accumulates stage
/// labels and indices as the error propagates outward.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code), message_(message) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& message() const noexcept { return message_; }
  const std::string& context() const noexcept { return context_; }

  /// Returns a copy with `label` prepended to the context chain.
  Error with_context(const std::string& label) const {
    Error e = *this;
    e.context_ = context_.empty() ? label : label + "/" + context_;
    return e;
  }

  const char* what() const noexcept override { return message_.c_str(); }

 private:
  ErrorCode code_;
  std::string message_;
  std::string context_;
};

/// Raised by the rank-line parser; keeps the raw oracle reply around.
class RankParseError : public Error {
 public:
  RankParseError(const std::string& message, std::string raw)
      : Error(ErrorCode::RankParseError, message), raw_(std::move(raw)) {}
  const std::string& raw() const noexcept { return raw_; }

 private:
  std::string raw_;
};

}  // namespace scarlet

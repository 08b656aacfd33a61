#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace bohm {

enum class ErrorKind {
  InvalidArgument,
  GridMismatch,
  UnresolvablePacket,
  BoundaryLeak,
  ZeroVector,
  NonNormalized,
  NyquistViolation,
  NonFiniteAmplitude,
  AllNodes,
  NodeProximity,
  StageTimeUnavailable,
  NonFinitePosition,
  OverlappingSupports,
  DegenerateDensity,
  EmptyPCell,
  OverlapTooLarge,
  SchemaViolation,
  Io,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Every failure raised by the library carries one of the ErrorKind tags so
/// callers (and tests) can branch on the category without parsing text.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Configuration failure listing every violation found, each prefixed by the
/// path of the offending key (e.g. "evolution.steps").
class SchemaViolation : public Error {
 public:
  explicit SchemaViolation(std::vector<std::string> violations);

  [[nodiscard]] const std::vector<std::string>& violations() const noexcept {
    return violations_;
  }

 private:
  std::vector<std::string> violations_;
};

}  // namespace bohm

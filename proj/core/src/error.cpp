#include "bohm/error.hpp"

namespace bohm {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::GridMismatch: return "GridMismatch";
    case ErrorKind::UnresolvablePacket: return "UnresolvablePacket";
    case ErrorKind::BoundaryLeak: return "BoundaryLeak";
    case ErrorKind::ZeroVector: return "ZeroVector";
    case ErrorKind::NonNormalized: return "NonNormalized";
    case ErrorKind::NyquistViolation: return "NyquistViolation";
    case ErrorKind::NonFiniteAmplitude: return "NonFiniteAmplitude";
    case ErrorKind::AllNodes: return "AllNodes";
    case ErrorKind::NodeProximity: return "NodeProximity";
    case ErrorKind::StageTimeUnavailable: return "StageTimeUnavailable";
    case ErrorKind::NonFinitePosition: return "NonFinitePosition";
    case ErrorKind::OverlappingSupports: return "OverlappingSupports";
    case ErrorKind::DegenerateDensity: return "DegenerateDensity";
    case ErrorKind::EmptyPCell: return "EmptyPCell";
    case ErrorKind::OverlapTooLarge: return "OverlapTooLarge";
    case ErrorKind::SchemaViolation: return "SchemaViolation";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

namespace {

std::string join_violations(const std::vector<std::string>& violations) {
  std::string out = "configuration rejected:";
  for (const auto& v : violations) {
    out += "\n  ";
    out += v;
  }
  return out;
}

}  // namespace

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

SchemaViolation::SchemaViolation(std::vector<std::string> violations)
    : Error(ErrorKind::SchemaViolation, join_violations(violations)),
      violations_(std::move(violations)) {}

}  // namespace bohm

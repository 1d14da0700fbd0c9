#include "mcnsim/types.hpp"

namespace mcnsim {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidInput: return "InvalidInput";
    case ErrorKind::kCycleDetected: return "CycleDetected";
    case ErrorKind::kMissingEdge: return "MissingEdge";
    case ErrorKind::kUnscheduledPredecessor: return "UnscheduledPredecessor";
    case ErrorKind::kCoreOutOfRange: return "CoreOutOfRange";
    case ErrorKind::kArmOutOfRange: return "ArmOutOfRange";
    case ErrorKind::kMissingAffinity: return "MissingAffinity";
    case ErrorKind::kMissingBaseline: return "MissingBaseline";
    case ErrorKind::kInvalidSpec: return "InvalidSpec";
    case ErrorKind::kParse: return "ParseError";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

}  // namespace mcnsim

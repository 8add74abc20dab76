#include "matchwire/error.hpp"

namespace matchwire {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DuplicateEntry: return "DuplicateEntry";
    case ErrorCode::ZeroQuota: return "ZeroQuota";
    case ErrorCode::UnknownAgent: return "UnknownAgent";
    case ErrorCode::QuotaShapeUnsupported: return "QuotaShapeUnsupported";
    case ErrorCode::MalformedMatching: return "MalformedMatching";
    case ErrorCode::InstanceTooLarge: return "InstanceTooLarge";
    case ErrorCode::NonFiniteUtility: return "NonFiniteUtility";
    case ErrorCode::NonStochasticRow: return "NonStochasticRow";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace matchwire

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace matchwire {

enum class ErrorCode {
  DuplicateEntry,
  ZeroQuota,
  UnknownAgent,
  QuotaShapeUnsupported,
  MalformedMatching,
  InstanceTooLarge,
  NonFiniteUtility,
  NonStochasticRow,
  InvalidArgument,
  ConfigError,
  IoError,
};

std::string_view to_string(ErrorCode code);

/// Single exception type for the library; `code()` distinguishes failure kinds.
class MatchError : public std::runtime_error {
 public:
  MatchError(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code), detail_(what) {}

  ErrorCode code() const noexcept { return code_; }
  /// The message without the error-code prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace matchwire

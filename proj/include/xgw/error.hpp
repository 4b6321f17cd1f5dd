#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace xgw {

enum class ErrorCode {
  kMalformedEvent,
  kDataIntegrity,
  kDegenerateGeometry,
  kFeatureUnavailable,
  kDegenerateFit,
  kRankDeficient,
  kSchemaMismatch,
  kContractViolation,
  kConfiguration,
  kParse,
  kGateway,
  kNotFound,
  kIo,
};

std::string_view error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::string detail = {})
      : std::runtime_error(message), code_(code), detail_(std::move(detail)) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

// Warnings go through a process-wide sink (stderr by default) so that tests
// and the service can capture them.
using WarningSink = void (*)(std::string_view message);
WarningSink set_warning_sink(WarningSink sink);
void warn(std::string_view message);

}  // namespace xgw

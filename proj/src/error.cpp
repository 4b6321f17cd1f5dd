#include "xgw/error.hpp"

#include <atomic>
#include <iostream>

namespace xgw {
namespace {

void stderr_sink(std::string_view message) { std::cerr << "warning: " << message << '\n'; }

std::atomic<WarningSink> g_sink{stderr_sink};

}  // namespace

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kMalformedEvent:
      return "malformed_event";
    case ErrorCode::kDataIntegrity:
      return "data_integrity";
    case ErrorCode::kDegenerateGeometry:
      return "degenerate_geometry";
    case ErrorCode::kFeatureUnavailable:
      return "feature_unavailable";
    case ErrorCode::kDegenerateFit:
      return "degenerate_fit";
    case ErrorCode::kRankDeficient:
      return "rank_deficient";
    case ErrorCode::kSchemaMismatch:
      return "schema_mismatch";
    case ErrorCode::kContractViolation:
      return "contract_violation";
    case ErrorCode::kConfiguration:
      return "configuration";
    case ErrorCode::kParse:
      return "parse";
    case ErrorCode::kGateway:
      return "gateway";
    case ErrorCode::kNotFound:
      return "not_found";
    case ErrorCode::kIo:
      return "io";
  }
  return "unknown";
}

WarningSink set_warning_sink(WarningSink sink) {
  return g_sink.exchange(sink ? sink : stderr_sink);
}

void warn(std::string_view message) { g_sink.load()(message); }

}  // namespace xgw

#include "xgw/pitch.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "xgw/error.hpp"

namespace xgw {

PitchPoint convert_coordinates(double raw_x, double raw_y, const ProviderPitch& dims,
                               std::string_view event_id) {
  if (!std::isfinite(raw_x) || !std::isfinite(raw_y)) {
    throw Error(ErrorCode::kMalformedEvent,
                "non-finite coordinates in event " + std::string(event_id), std::string(event_id));
  }
  if (!(dims.length > 0.0) || !(dims.width > 0.0)) {
    throw Error(ErrorCode::kContractViolation, "provider pitch dimensions must be positive");
  }
  const double x = raw_x * kPitchLength / dims.length;
  const double y = raw_y * kPitchWidth / dims.width;
  return {std::clamp(x, 0.0, kPitchLength), std::clamp(y, 0.0, kPitchWidth)};
}

std::pair<double, double> to_provider_coordinates(const PitchPoint& p, const ProviderPitch& dims) {
  return {p.x * dims.length / kPitchLength, p.y * dims.width / kPitchWidth};
}

double distance(const PitchPoint& a, const PitchPoint& b) { return std::hypot(a.x - b.x, a.y - b.y); }

}  // namespace xgw

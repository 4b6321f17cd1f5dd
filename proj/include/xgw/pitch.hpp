#pragma once

#include <string_view>
#include <utility>

namespace xgw {

inline constexpr double kPitchLength = 105.0;
inline constexpr double kPitchWidth = 68.0;
inline constexpr double kGoalWidth = 7.32;
inline constexpr double kGoalCenterX = kPitchLength;
inline constexpr double kGoalCenterY = kPitchWidth / 2.0;
inline constexpr double kLowerPostY = kGoalCenterY - kGoalWidth / 2.0;  // 30.34
inline constexpr double kUpperPostY = kGoalCenterY + kGoalWidth / 2.0;  // 37.66

// Metric pitch location; attack is always toward x = 105.
struct PitchPoint {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const PitchPoint&, const PitchPoint&) = default;
};

inline constexpr PitchPoint kGoalCenter{kGoalCenterX, kGoalCenterY};
inline constexpr PitchPoint kLowerPost{kGoalCenterX, kLowerPostY};
inline constexpr PitchPoint kUpperPost{kGoalCenterX, kUpperPostY};

// Provider grid dimensions (StatsBomb-style 120 x 80 by default).
struct ProviderPitch {
  double length = 120.0;
  double width = 80.0;
};

// Scales provider units onto the 105 x 68 pitch and clamps into bounds.
// Throws ErrorCode::kMalformedEvent (carrying event_id) on non-finite input.
PitchPoint convert_coordinates(double raw_x, double raw_y, const ProviderPitch& dims,
                               std::string_view event_id = {});

// Inverse affine map, exact only for points that were not clamped.
std::pair<double, double> to_provider_coordinates(const PitchPoint& p, const ProviderPitch& dims);

double distance(const PitchPoint& a, const PitchPoint& b);

}  // namespace xgw

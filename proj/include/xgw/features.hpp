#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string_view>

#include "xgw/shot.hpp"

namespace xgw {

// Model schema. The order is shared by fitting, explanation and every file
// format and must not change.
enum class Feature : std::size_t {
  kSquaredDistanceToCenter,
  kDistanceToGoal,
  kNearbyOpponents3m,
  kOpponentsInTriangle,
  kGkDistanceToGoal,
  kDistanceToNearestOpponent,
  kAngleToGk,
  kShotWithLeftFoot,
  kShotAfterThrowIn,
  kShotAfterCorner,
  kShotAfterFreeKick,
};

inline constexpr std::size_t kNumFeatures = 11;

enum class FeatureKind { kContinuous, kCount, kBinary };

struct FeatureInfo {
  std::string_view name;
  std::string_view display_name;
  std::string_view unit;
  FeatureKind kind;
};

inline constexpr std::array<FeatureInfo, kNumFeatures> kFeatureSchema{{
    {"squared_distance_to_center", "vertical distance to center", "m^2", FeatureKind::kContinuous},
    {"distance_to_goal", "euclidean distance to goal", "m", FeatureKind::kContinuous},
    {"nearby_opponents_3m", "nearby opponents within 3 meters", "count", FeatureKind::kCount},
    {"opponents_in_triangle", "number of opponents in triangle formed by shot location and goalposts",
     "count", FeatureKind::kCount},
    {"gk_distance_to_goal", "goalkeeper distance to goal", "m", FeatureKind::kContinuous},
    {"distance_to_nearest_opponent", "distance to nearest opponent", "m", FeatureKind::kContinuous},
    {"angle_to_gk", "angle to goalkeeper", "deg", FeatureKind::kContinuous},
    {"shot_with_left_foot", "shot taken with left foot", "0/1", FeatureKind::kBinary},
    {"shot_after_throw_in", "shot after throw in", "0/1", FeatureKind::kBinary},
    {"shot_after_corner", "shot after corner", "0/1", FeatureKind::kBinary},
    {"shot_after_free_kick", "shot after free kick", "0/1", FeatureKind::kBinary},
}};

constexpr const FeatureInfo& feature_info(Feature f) {
  return kFeatureSchema[static_cast<std::size_t>(f)];
}
std::optional<Feature> find_feature(std::string_view name);

struct FeatureVector {
  std::array<double, kNumFeatures> values{};

  double& operator[](Feature f) { return values[static_cast<std::size_t>(f)]; }
  double operator[](Feature f) const { return values[static_cast<std::size_t>(f)]; }
  std::span<const double> span() const { return values; }

  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

// Features computed for selection diagnostics only; not part of the model.
struct DiagnosticFeatures {
  double angle_to_goal = 0.0;
  double distance_to_gk = 0.0;
  double vertical_distance_to_center = 0.0;
  double angle_to_nearest_opponent = 0.0;
};

inline constexpr double kNearbyRadius = 3.0;
inline constexpr double kGeometryEpsilon = 1e-9;

double distance_to_goal(const PitchPoint& p);
double squared_distance_to_center(const PitchPoint& p);

// Angle in degrees subtended at p by the two posts. 180 between the posts on
// the goal line, 0 on the goal line outside them. Throws kDegenerateGeometry
// when p coincides with a post.
double angle_to_goal(const PitchPoint& p);

// Angle in degrees between shot->target and the goal line, in [0, 90].
double angle_to_gk(const PitchPoint& shot, const PitchPoint& keeper);

// Opponents (keeper included) inside the shot/post triangle or within
// kGeometryEpsilon of it. A shot on the goal line degenerates the triangle to
// a segment and the count is of opponents on that segment.
int opponents_in_triangle(const PitchPoint& shot, std::span<const FramePlayer> frame);

int nearby_opponents(const PitchPoint& shot, std::span<const FramePlayer> frame,
                     double radius = kNearbyRadius);

// Throws kFeatureUnavailable when no opponent is visible.
double distance_to_nearest_opponent(const PitchPoint& shot, std::span<const FramePlayer> frame);

// Requires a visible opposing keeper and at least one opponent; errors name
// the offending feature.
FeatureVector build_feature_vector(const ShotEvent& shot);
DiagnosticFeatures build_diagnostic_features(const ShotEvent& shot);

// The four dropped features, by name, then the model schema.
inline constexpr std::array<std::string_view, 4> kDiagnosticFeatureNames{
    "angle_to_goal", "distance_to_gk", "vertical_distance_to_center", "angle_to_nearest_opponent"};

}  // namespace xgw

#include "xgw/features.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "xgw/error.hpp"
#include "xgw/simd/kernels.hpp"

namespace xgw {
namespace {

constexpr double kRadToDeg = 180.0 / std::numbers::pi;

double cross(double ax, double ay, double bx, double by) { return ax * by - ay * bx; }

double distance_to_segment(const PitchPoint& p, const PitchPoint& a, const PitchPoint& b) {
  const double ex = b.x - a.x;
  const double ey = b.y - a.y;
  const double len2 = ex * ex + ey * ey;
  double t = 0.0;
  if (len2 > 0.0) t = std::clamp(((p.x - a.x) * ex + (p.y - a.y) * ey) / len2, 0.0, 1.0);
  return std::hypot(p.x - (a.x + t * ex), p.y - (a.y + t * ey));
}

// Distance from p to the closed triangle abc (0 inside). Degenerate triangles
// reduce to their edge segments.
double distance_to_triangle(const PitchPoint& p, const PitchPoint& a, const PitchPoint& b,
                            const PitchPoint& c) {
  const double v0x = b.x - a.x, v0y = b.y - a.y;
  const double v1x = c.x - a.x, v1y = c.y - a.y;
  const double v2x = p.x - a.x, v2y = p.y - a.y;
  const double det = cross(v0x, v0y, v1x, v1y);
  if (std::abs(det) > 1e-12) {
    const double wb = cross(v2x, v2y, v1x, v1y) / det;
    const double wc = cross(v0x, v0y, v2x, v2y) / det;
    if (wb >= 0.0 && wc >= 0.0 && wb + wc <= 1.0) return 0.0;
  }
  return std::min({distance_to_segment(p, a, b), distance_to_segment(p, b, c),
                   distance_to_segment(p, c, a)});
}

struct OpponentCoords {
  std::vector<double> xs;
  std::vector<double> ys;
};

OpponentCoords opponent_coords(std::span<const FramePlayer> frame) {
  OpponentCoords coords;
  coords.xs.reserve(frame.size());
  coords.ys.reserve(frame.size());
  for (const FramePlayer& player : frame) {
    if (!player.is_opponent()) continue;
    coords.xs.push_back(player.location.x);
    coords.ys.push_back(player.location.y);
  }
  return coords;
}

[[noreturn]] void unavailable(std::string_view feature, std::string_view why,
                              const std::string& shot_id) {
  throw Error(ErrorCode::kFeatureUnavailable,
              "feature " + std::string(feature) + " unavailable for shot " + shot_id + ": " +
                  std::string(why),
              std::string(feature));
}

}  // namespace

std::optional<Feature> find_feature(std::string_view name) {
  for (std::size_t i = 0; i < kNumFeatures; ++i) {
    if (kFeatureSchema[i].name == name) return static_cast<Feature>(i);
  }
  return std::nullopt;
}

double distance_to_goal(const PitchPoint& p) { return distance(p, kGoalCenter); }

double squared_distance_to_center(const PitchPoint& p) {
  const double dy = p.y - kGoalCenterY;
  return dy * dy;
}

double angle_to_goal(const PitchPoint& p) {
  const double ux = kLowerPost.x - p.x, uy = kLowerPost.y - p.y;
  const double vx = kUpperPost.x - p.x, vy = kUpperPost.y - p.y;
  if ((ux == 0.0 && uy == 0.0) || (vx == 0.0 && vy == 0.0)) {
    throw Error(ErrorCode::kDegenerateGeometry, "shot location coincides with a goalpost");
  }
  return std::atan2(std::abs(cross(ux, uy, vx, vy)), ux * vx + uy * vy) * kRadToDeg;
}

double angle_to_gk(const PitchPoint& shot, const PitchPoint& keeper) {
  const double dx = std::abs(keeper.x - shot.x);
  const double dy = std::abs(keeper.y - shot.y);
  if (dx == 0.0 && dy == 0.0) {
    throw Error(ErrorCode::kDegenerateGeometry, "shot location coincides with target player");
  }
  return std::atan2(dx, dy) * kRadToDeg;
}

int opponents_in_triangle(const PitchPoint& shot, std::span<const FramePlayer> frame) {
  int count = 0;
  for (const FramePlayer& player : frame) {
    if (!player.is_opponent()) continue;
    if (distance_to_triangle(player.location, shot, kLowerPost, kUpperPost) <= kGeometryEpsilon) {
      ++count;
    }
  }
  return count;
}

int nearby_opponents(const PitchPoint& shot, std::span<const FramePlayer> frame, double radius) {
  const OpponentCoords coords = opponent_coords(frame);
  const double r = radius + kGeometryEpsilon;
  return static_cast<int>(simd::count_within(coords.xs, coords.ys, shot.x, shot.y, r * r));
}

double distance_to_nearest_opponent(const PitchPoint& shot, std::span<const FramePlayer> frame) {
  const OpponentCoords coords = opponent_coords(frame);
  if (coords.xs.empty()) {
    throw Error(ErrorCode::kFeatureUnavailable,
                "feature distance_to_nearest_opponent unavailable: no opponents visible",
                "distance_to_nearest_opponent");
  }
  return std::sqrt(simd::min_squared_distance(coords.xs, coords.ys, shot.x, shot.y));
}

FeatureVector build_feature_vector(const ShotEvent& shot) {
  const auto keeper = opposing_keeper(shot);
  if (!keeper) unavailable("gk_distance_to_goal", "no opposing keeper in frame", shot.shot_id);

  FeatureVector v;
  v[Feature::kSquaredDistanceToCenter] = squared_distance_to_center(shot.location);
  v[Feature::kDistanceToGoal] = distance_to_goal(shot.location);
  v[Feature::kNearbyOpponents3m] = nearby_opponents(shot.location, shot.freeze_frame);
  v[Feature::kOpponentsInTriangle] = opponents_in_triangle(shot.location, shot.freeze_frame);
  v[Feature::kGkDistanceToGoal] = distance(*keeper, kGoalCenter);
  v[Feature::kDistanceToNearestOpponent] =
      distance_to_nearest_opponent(shot.location, shot.freeze_frame);
  try {
    v[Feature::kAngleToGk] = angle_to_gk(shot.location, *keeper);
  } catch (const Error& e) {
    throw Error(e.code(), "feature angle_to_gk for shot " + shot.shot_id + ": " + e.what(),
                "angle_to_gk");
  }
  v[Feature::kShotWithLeftFoot] = shot.body_part == BodyPart::kLeftFoot ? 1.0 : 0.0;
  v[Feature::kShotAfterThrowIn] = shot.play_pattern == PlayPattern::kFromThrowIn ? 1.0 : 0.0;
  v[Feature::kShotAfterCorner] = shot.play_pattern == PlayPattern::kFromCorner ? 1.0 : 0.0;
  v[Feature::kShotAfterFreeKick] = shot.play_pattern == PlayPattern::kFromFreeKick ? 1.0 : 0.0;
  return v;
}

DiagnosticFeatures build_diagnostic_features(const ShotEvent& shot) {
  const auto keeper = opposing_keeper(shot);
  if (!keeper) unavailable("distance_to_gk", "no opposing keeper in frame", shot.shot_id);

  const FramePlayer* nearest = nullptr;
  double best = 0.0;
  for (const FramePlayer& player : shot.freeze_frame) {
    if (!player.is_opponent()) continue;
    const double d = distance(shot.location, player.location);
    if (!nearest || d < best) {
      nearest = &player;
      best = d;
    }
  }

  DiagnosticFeatures d;
  d.angle_to_goal = angle_to_goal(shot.location);
  d.distance_to_gk = distance(shot.location, *keeper);
  d.vertical_distance_to_center = std::abs(shot.location.y - kGoalCenterY);
  d.angle_to_nearest_opponent = angle_to_gk(shot.location, nearest->location);
  return d;
}

}  // namespace xgw

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "xgw/pitch.hpp"

namespace xgw {

enum class BodyPart { kLeftFoot, kRightFoot, kHead, kOther };

enum class PlayPattern { kOpenPlay, kFromThrowIn, kFromCorner, kFromFreeKick, kPenalty, kOther };

std::string_view to_string(BodyPart part);
std::string_view to_string(PlayPattern pattern);
std::optional<BodyPart> parse_body_part(std::string_view name);
std::optional<PlayPattern> parse_play_pattern(std::string_view name);

struct FramePlayer {
  PitchPoint location;
  bool is_teammate = false;
  bool is_keeper = false;

  bool is_opponent() const { return !is_teammate; }
  friend bool operator==(const FramePlayer&, const FramePlayer&) = default;
};

struct ShotEvent {
  std::string shot_id;
  std::string match_id;
  std::string competition_id;
  int minute = 0;
  int second = 0;
  std::string player_name;
  std::string team_name;
  bool outcome_is_goal = false;
  BodyPart body_part = BodyPart::kRightFoot;
  PlayPattern play_pattern = PlayPattern::kOpenPlay;
  PitchPoint location;
  std::vector<FramePlayer> freeze_frame;
  // False when no 360 record matched the shot; such shots never enter a fit.
  bool frame_available = false;

  bool is_penalty() const { return play_pattern == PlayPattern::kPenalty; }
  friend bool operator==(const ShotEvent&, const ShotEvent&) = default;
};

// The opposing keeper, if visible. Frames hold at most one.
std::optional<PitchPoint> opposing_keeper(const ShotEvent& shot);

}  // namespace xgw

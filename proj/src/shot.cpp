#include "xgw/shot.hpp"

#include <array>
#include <utility>

namespace xgw {
namespace {

constexpr std::array<std::pair<BodyPart, std::string_view>, 4> kBodyPartNames{{
    {BodyPart::kLeftFoot, "left_foot"},
    {BodyPart::kRightFoot, "right_foot"},
    {BodyPart::kHead, "head"},
    {BodyPart::kOther, "other"},
}};

constexpr std::array<std::pair<PlayPattern, std::string_view>, 6> kPlayPatternNames{{
    {PlayPattern::kOpenPlay, "open_play"},
    {PlayPattern::kFromThrowIn, "from_throw_in"},
    {PlayPattern::kFromCorner, "from_corner"},
    {PlayPattern::kFromFreeKick, "from_free_kick"},
    {PlayPattern::kPenalty, "penalty"},
    {PlayPattern::kOther, "other"},
}};

}  // namespace

std::string_view to_string(BodyPart part) {
  for (const auto& [value, name] : kBodyPartNames) {
    if (value == part) return name;
  }
  return "other";
}

std::string_view to_string(PlayPattern pattern) {
  for (const auto& [value, name] : kPlayPatternNames) {
    if (value == pattern) return name;
  }
  return "other";
}

std::optional<BodyPart> parse_body_part(std::string_view name) {
  for (const auto& [value, text] : kBodyPartNames) {
    if (text == name) return value;
  }
  return std::nullopt;
}

std::optional<PlayPattern> parse_play_pattern(std::string_view name) {
  for (const auto& [value, text] : kPlayPatternNames) {
    if (text == name) return value;
  }
  return std::nullopt;
}

std::optional<PitchPoint> opposing_keeper(const ShotEvent& shot) {
  for (const FramePlayer& player : shot.freeze_frame) {
    if (player.is_keeper && player.is_opponent()) return player.location;
  }
  return std::nullopt;
}

}  // namespace xgw

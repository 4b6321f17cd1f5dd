#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "xgw/shot.hpp"

namespace xgw {

struct IngestConfig {
  ProviderPitch pitch;
  bool include_penalties = false;
};

// Version of the provider-string lookup tables below. Bump when a mapping
// changes so cached shot files can be regenerated.
inline constexpr int kProviderLookupVersion = 1;

// Provider play-pattern / body-part names. Unknown strings map to kOther and
// emit a warning.
PlayPattern map_play_pattern(std::string_view provider_name);
BodyPart map_body_part(std::string_view provider_name);

using FrameIndex = std::unordered_map<std::string, std::vector<FramePlayer>>;

// Parses one match's event document and returns its shots with empty frames.
std::vector<ShotEvent> parse_shot_events(const nlohmann::json& events, std::string_view match_id,
                                         std::string_view competition_id,
                                         const ProviderPitch& pitch);

// Indexes a 360 document by event id. Duplicate ids are a data-integrity error.
FrameIndex index_frames(const nlohmann::json& frames, const ProviderPitch& pitch);

// Attaches frames by event id. Shots without a record get an empty frame and
// frame_available = false. Idempotent.
std::vector<ShotEvent> merge_freeze_frames(std::vector<ShotEvent> shots, const FrameIndex& frames);

// Shots usable for fitting: frame present and, unless configured otherwise,
// not a penalty. Input order is preserved.
std::vector<ShotEvent> select_model_shots(std::span<const ShotEvent> shots,
                                          const IngestConfig& config);

struct MatchInfo {
  std::string match_id;
  std::string label;  // "Home vs Away"
};

// Reads data/<competition_id>/<match_id>/{events.json,three-sixty.json}.
// Matches are visited in lexicographic order of their directory names.
std::vector<ShotEvent> ingest_competition(const std::filesystem::path& data_root,
                                          std::string_view competition_id,
                                          const IngestConfig& config);

std::vector<MatchInfo> list_matches(const std::filesystem::path& data_root,
                                    std::string_view competition_id);

// Human-readable competition name from data/<id>/competition.json, or the id.
std::string competition_name(const std::filesystem::path& data_root,
                             std::string_view competition_id);

nlohmann::json read_json_file(const std::filesystem::path& path);

}  // namespace xgw

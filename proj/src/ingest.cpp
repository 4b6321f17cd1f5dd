#include "xgw/ingest.hpp"

#include <algorithm>
#include <fstream>
#include <string>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "xgw/error.hpp"

namespace xgw {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct PatternEntry {
  std::string_view provider;
  PlayPattern pattern;
};

// Lookup table version kProviderLookupVersion.
constexpr PatternEntry kPlayPatternTable[] = {
    {"Regular Play", PlayPattern::kOpenPlay},   {"From Counter", PlayPattern::kOpenPlay},
    {"From Throw In", PlayPattern::kFromThrowIn}, {"From Corner", PlayPattern::kFromCorner},
    {"From Free Kick", PlayPattern::kFromFreeKick}, {"From Goal Kick", PlayPattern::kOther},
    {"From Keeper", PlayPattern::kOther},       {"From Kick Off", PlayPattern::kOther},
    {"Other", PlayPattern::kOther},
};

struct BodyPartEntry {
  std::string_view provider;
  BodyPart part;
};

constexpr BodyPartEntry kBodyPartTable[] = {
    {"Left Foot", BodyPart::kLeftFoot},
    {"Right Foot", BodyPart::kRightFoot},
    {"Head", BodyPart::kHead},
    {"Other", BodyPart::kOther},
};

std::string nested_name(const json& object, const char* key) {
  const auto it = object.find(key);
  if (it == object.end() || !it->is_object()) return {};
  const auto name = it->find("name");
  return (name != it->end() && name->is_string()) ? name->get<std::string>() : std::string{};
}

PitchPoint read_location(const json& holder, const ProviderPitch& pitch,
                         std::string_view event_id) {
  const auto it = holder.find("location");
  if (it == holder.end() || !it->is_array() || it->size() < 2 || !(*it)[0].is_number() ||
      !(*it)[1].is_number()) {
    throw Error(ErrorCode::kMalformedEvent,
                "missing or malformed location in event " + std::string(event_id),
                std::string(event_id));
  }
  return convert_coordinates((*it)[0].get<double>(), (*it)[1].get<double>(), pitch, event_id);
}

}  // namespace

PlayPattern map_play_pattern(std::string_view provider_name) {
  for (const auto& entry : kPlayPatternTable) {
    if (entry.provider == provider_name) return entry.pattern;
  }
  warn("unknown play pattern '" + std::string(provider_name) + "', mapped to other");
  return PlayPattern::kOther;
}

BodyPart map_body_part(std::string_view provider_name) {
  for (const auto& entry : kBodyPartTable) {
    if (entry.provider == provider_name) return entry.part;
  }
  warn("unknown body part '" + std::string(provider_name) + "', mapped to other");
  return BodyPart::kOther;
}

std::vector<ShotEvent> parse_shot_events(const json& events, std::string_view match_id,
                                         std::string_view competition_id,
                                         const ProviderPitch& pitch) {
  if (!events.is_array()) {
    throw Error(ErrorCode::kParse, "event document for match " + std::string(match_id) +
                                       " is not an array");
  }
  std::vector<ShotEvent> shots;
  for (const json& event : events) {
    if (nested_name(event, "type") != "Shot") continue;
    const auto shot_it = event.find("shot");
    if (shot_it == event.end() || !shot_it->is_object()) continue;
    const json& detail = *shot_it;

    ShotEvent shot;
    shot.shot_id = event.value("id", std::string{});
    if (shot.shot_id.empty()) {
      throw Error(ErrorCode::kMalformedEvent,
                  "shot without id in match " + std::string(match_id));
    }
    shot.match_id = std::string(match_id);
    shot.competition_id = std::string(competition_id);
    shot.minute = event.value("minute", 0);
    shot.second = event.value("second", 0);
    shot.player_name = nested_name(event, "player");
    shot.team_name = nested_name(event, "team");
    shot.outcome_is_goal = nested_name(detail, "outcome") == "Goal";
    shot.body_part = map_body_part(nested_name(detail, "body_part"));
    shot.play_pattern = nested_name(detail, "type") == "Penalty"
                            ? PlayPattern::kPenalty
                            : map_play_pattern(nested_name(event, "play_pattern"));
    shot.location = read_location(event, pitch, shot.shot_id);
    shots.push_back(std::move(shot));
  }
  return shots;
}

FrameIndex index_frames(const json& frames, const ProviderPitch& pitch) {
  if (!frames.is_array()) throw Error(ErrorCode::kParse, "360 document is not an array");
  FrameIndex index;
  for (const json& record : frames) {
    const std::string event_id = record.value("event_uuid", std::string{});
    if (event_id.empty()) continue;
    std::vector<FramePlayer> players;
    bool have_keeper = false;
    if (const auto ff = record.find("freeze_frame"); ff != record.end() && ff->is_array()) {
      for (const json& entry : *ff) {
        FramePlayer player;
        player.location = read_location(entry, pitch, event_id);
        player.is_teammate = entry.value("teammate", false);
        player.is_keeper = entry.value("keeper", false);
        if (player.is_keeper && !player.is_teammate) {
          if (have_keeper) {
            warn("frame " + event_id + " has more than one opposing keeper; extra demoted");
            player.is_keeper = false;
          }
          have_keeper = true;
        }
        players.push_back(player);
      }
    }
    if (!index.emplace(event_id, std::move(players)).second) {
      throw Error(ErrorCode::kDataIntegrity, "duplicate 360 record for event " + event_id,
                  event_id);
    }
  }
  return index;
}

std::vector<ShotEvent> merge_freeze_frames(std::vector<ShotEvent> shots, const FrameIndex& frames) {
  for (ShotEvent& shot : shots) {
    const auto it = frames.find(shot.shot_id);
    if (it == frames.end()) {
      shot.freeze_frame.clear();
      shot.frame_available = false;
    } else {
      shot.freeze_frame = it->second;
      shot.frame_available = !it->second.empty();
    }
  }
  return shots;
}

std::vector<ShotEvent> select_model_shots(std::span<const ShotEvent> shots,
                                          const IngestConfig& config) {
  std::vector<ShotEvent> selected;
  for (const ShotEvent& shot : shots) {
    if (!shot.frame_available || shot.freeze_frame.empty()) continue;
    if (shot.is_penalty() && !config.include_penalties) continue;
    selected.push_back(shot);
  }
  return selected;
}

json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kParse, "invalid JSON in " + path.string() + ": " + e.what());
  }
}

namespace {

std::vector<fs::path> match_directories(const fs::path& data_root, std::string_view competition_id) {
  const fs::path root = data_root / std::string(competition_id);
  if (!fs::is_directory(root)) {
    throw Error(ErrorCode::kNotFound, "no data directory for competition " +
                                          std::string(competition_id) + " under " +
                                          data_root.string());
  }
  std::vector<fs::path> dirs;
  for (const auto& entry : fs::directory_iterator(root)) {
    if (entry.is_directory() && fs::exists(entry.path() / "events.json")) {
      dirs.push_back(entry.path());
    }
  }
  std::sort(dirs.begin(), dirs.end());
  return dirs;
}

}  // namespace

std::vector<ShotEvent> ingest_competition(const fs::path& data_root,
                                          std::string_view competition_id,
                                          const IngestConfig& config) {
  std::vector<ShotEvent> all;
  std::unordered_set<std::string> seen;
  for (const fs::path& dir : match_directories(data_root, competition_id)) {
    const std::string match_id = dir.filename().string();
    auto shots = parse_shot_events(read_json_file(dir / "events.json"), match_id, competition_id,
                                   config.pitch);
    FrameIndex frames;
    if (fs::exists(dir / "three-sixty.json")) {
      frames = index_frames(read_json_file(dir / "three-sixty.json"), config.pitch);
    }
    shots = merge_freeze_frames(std::move(shots), frames);
    for (ShotEvent& shot : shots) {
      if (!seen.insert(shot.shot_id).second) {
        throw Error(ErrorCode::kDataIntegrity, "duplicate shot id " + shot.shot_id, shot.shot_id);
      }
      all.push_back(std::move(shot));
    }
  }
  return all;
}

std::vector<MatchInfo> list_matches(const fs::path& data_root, std::string_view competition_id) {
  std::vector<MatchInfo> matches;
  for (const fs::path& dir : match_directories(data_root, competition_id)) {
    MatchInfo info{dir.filename().string(), {}};
    if (fs::exists(dir / "match.json")) {
      const json meta = read_json_file(dir / "match.json");
      info.label = meta.value("home_team", std::string{}) + " vs " +
                   meta.value("away_team", std::string{});
    } else {
      std::vector<std::string> teams;
      for (const json& event : read_json_file(dir / "events.json")) {
        const std::string team = nested_name(event, "team");
        if (!team.empty() && std::find(teams.begin(), teams.end(), team) == teams.end()) {
          teams.push_back(team);
        }
        if (teams.size() == 2) break;
      }
      info.label = teams.size() == 2 ? teams[0] + " vs " + teams[1] : info.match_id;
    }
    matches.push_back(std::move(info));
  }
  return matches;
}

std::string competition_name(const fs::path& data_root, std::string_view competition_id) {
  const fs::path meta = data_root / std::string(competition_id) / "competition.json";
  if (fs::exists(meta)) {
    const json doc = read_json_file(meta);
    if (doc.contains("name") && doc["name"].is_string()) return doc["name"].get<std::string>();
  }
  return std::string(competition_id);
}

}  // namespace xgw

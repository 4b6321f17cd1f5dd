#include "xgw/shots_table.hpp"

#include <array>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "xgw/error.hpp"
#include "xgw/features.hpp"
#include "xgw/text_format.hpp"

namespace xgw {
namespace {

constexpr std::array<std::string_view, 14> kBaseColumns{
    "shot_id",   "match_id",  "competition_id", "minute",        "second",
    "player_name", "team_name", "outcome_is_goal", "body_part",   "play_pattern",
    "x",         "y",         "frame_available", "freeze_frame",
};

std::string encode_frame(const std::vector<FramePlayer>& frame) {
  std::string out;
  for (std::size_t i = 0; i < frame.size(); ++i) {
    if (i) out += ';';
    const FramePlayer& p = frame[i];
    out += format_double(p.location.x);
    out += ',';
    out += format_double(p.location.y);
    out += ',';
    out += p.is_teammate ? 't' : 'o';
    if (p.is_keeper) out += 'k';
  }
  return out;
}

[[noreturn]] void bad_row(std::size_t line, const std::string& what) {
  throw Error(ErrorCode::kParse, "shots table line " + std::to_string(line) + ": " + what);
}

std::vector<FramePlayer> decode_frame(std::string_view text, std::size_t line) {
  std::vector<FramePlayer> frame;
  if (text.empty()) return frame;
  for (std::string_view entry : split(text, ';')) {
    const auto parts = split(entry, ',');
    if (parts.size() != 3) bad_row(line, "bad frame entry '" + std::string(entry) + "'");
    const auto x = parse_double(parts[0]);
    const auto y = parse_double(parts[1]);
    const std::string_view role = parts[2];
    if (!x || !y || role.empty() || (role[0] != 't' && role[0] != 'o') ||
        (role.size() == 2 && role[1] != 'k') || role.size() > 2) {
      bad_row(line, "bad frame entry '" + std::string(entry) + "'");
    }
    frame.push_back({{*x, *y}, role[0] == 't', role.size() == 2});
  }
  return frame;
}

}  // namespace

void write_shots_table(std::ostream& out, std::span<const ShotEvent> shots) {
  for (std::size_t i = 0; i < kBaseColumns.size(); ++i) out << (i ? "\t" : "") << kBaseColumns[i];
  for (const FeatureInfo& info : kFeatureSchema) out << '\t' << info.name;
  out << '\n';
  for (const ShotEvent& s : shots) {
    out << escape_field(s.shot_id) << '\t' << escape_field(s.match_id) << '\t'
        << escape_field(s.competition_id) << '\t' << s.minute << '\t' << s.second << '\t'
        << escape_field(s.player_name) << '\t' << escape_field(s.team_name) << '\t'
        << (s.outcome_is_goal ? 1 : 0) << '\t' << to_string(s.body_part) << '\t'
        << to_string(s.play_pattern) << '\t' << format_double(s.location.x) << '\t'
        << format_double(s.location.y) << '\t' << (s.frame_available ? 1 : 0) << '\t'
        << encode_frame(s.freeze_frame);
    std::optional<FeatureVector> features;
    if (s.frame_available) {
      try {
        features = build_feature_vector(s);
      } catch (const Error&) {
      }
    }
    for (std::size_t j = 0; j < kNumFeatures; ++j) {
      out << '\t';
      if (features) out << format_double(features->values[j]);
    }
    out << '\n';
  }
}

std::vector<ShotEvent> read_shots_table(std::istream& in) {
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line)) throw Error(ErrorCode::kParse, "shots table is empty");
  const auto header = split(line, '\t');
  if (header.size() < kBaseColumns.size()) bad_row(line_no, "unexpected header");
  for (std::size_t i = 0; i < kBaseColumns.size(); ++i) {
    if (header[i] != kBaseColumns[i]) bad_row(line_no, "unexpected column " + std::string(header[i]));
  }

  std::vector<ShotEvent> shots;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = split(line, '\t');
    if (f.size() != header.size()) bad_row(line_no, "wrong number of columns");
    ShotEvent s;
    s.shot_id = unescape_field(f[0]);
    s.match_id = unescape_field(f[1]);
    s.competition_id = unescape_field(f[2]);
    const auto minute = parse_int(f[3]);
    const auto second = parse_int(f[4]);
    const auto body = parse_body_part(f[8]);
    const auto pattern = parse_play_pattern(f[9]);
    const auto x = parse_double(f[10]);
    const auto y = parse_double(f[11]);
    if (!minute || !second || !body || !pattern || !x || !y || (f[7] != "0" && f[7] != "1") ||
        (f[12] != "0" && f[12] != "1")) {
      bad_row(line_no, "malformed value");
    }
    s.minute = static_cast<int>(*minute);
    s.second = static_cast<int>(*second);
    s.player_name = unescape_field(f[5]);
    s.team_name = unescape_field(f[6]);
    s.outcome_is_goal = f[7] == "1";
    s.body_part = *body;
    s.play_pattern = *pattern;
    s.location = {*x, *y};
    s.frame_available = f[12] == "1";
    s.freeze_frame = decode_frame(f[13], line_no);
    shots.push_back(std::move(s));
  }
  return shots;
}

void save_shots_table(const std::filesystem::path& path, std::span<const ShotEvent> shots) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  write_shots_table(out, shots);
}

std::vector<ShotEvent> load_shots_table(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kNotFound, "no shots file at " + path.string());
  return read_shots_table(in);
}

}  // namespace xgw

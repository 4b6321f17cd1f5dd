#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "xgw/shot.hpp"

namespace xgw {

// Canonical per-competition shots file: tab-separated, one header row, one
// row per ShotEvent. Column order is fixed (see README "Shots file").
// Feature columns are written for eligible shots and left empty otherwise;
// they are informational and recomputed on load.
inline constexpr int kShotsTableVersion = 1;

void write_shots_table(std::ostream& out, std::span<const ShotEvent> shots);
std::vector<ShotEvent> read_shots_table(std::istream& in);

void save_shots_table(const std::filesystem::path& path, std::span<const ShotEvent> shots);
std::vector<ShotEvent> load_shots_table(const std::filesystem::path& path);

}  // namespace xgw

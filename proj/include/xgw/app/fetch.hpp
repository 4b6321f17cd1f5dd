#pragma once

#include <filesystem>
#include <string>

namespace xgw::app {

// Copies one competition season from an open-data tree (an http(s) base URL
// or a local directory holding matches/, events/ and three-sixty/) into
// data_root/<target_id>/<match_id>/. Files already present are kept.
struct FetchRequest {
  std::string source;  // e.g. https://host/open-data/master/data
  std::string competition;
  std::string season;
  std::string target_id;
  std::filesystem::path data_root;
};

struct FetchReport {
  std::size_t matches = 0;
  std::size_t downloaded = 0;
  std::size_t cached = 0;
  std::size_t missing_frames = 0;
};

FetchReport fetch_competition(const FetchRequest& request);

}  // namespace xgw::app

#pragma once

#include <atomic>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

#include "xgw/error.hpp"

namespace xgw::test {

inline std::filesystem::path fixture_dir() { return XGW_FIXTURE_DIR; }
inline std::filesystem::path fixture_data() { return fixture_dir() / "data"; }
inline std::filesystem::path asset_dir() { return XGW_ASSET_DIR; }

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("xgw_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

// Collects warnings for the lifetime of the object.
class WarningCapture {
 public:
  WarningCapture() { previous_ = set_warning_sink(&WarningCapture::sink); messages().clear(); }
  ~WarningCapture() { set_warning_sink(previous_); }
  static std::vector<std::string>& messages() {
    static std::vector<std::string> m;
    return m;
  }

 private:
  static void sink(std::string_view message) { messages().emplace_back(message); }
  WarningSink previous_;
};

}  // namespace xgw::test

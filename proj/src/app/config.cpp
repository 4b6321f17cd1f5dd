#include "xgw/app/config.hpp"

#include <cstdlib>
#include <fstream>
#include <istream>

#include "xgw/error.hpp"
#include "xgw/text_format.hpp"

#ifndef XGW_DEFAULT_ASSET_DIR
#define XGW_DEFAULT_ASSET_DIR "assets"
#endif

namespace xgw::app {
namespace fs = std::filesystem;

namespace {

[[noreturn]] void bad_value(std::size_t line, std::string_view key, std::string_view value) {
  throw Error(ErrorCode::kConfiguration,
              "config line " + std::to_string(line) + ": invalid value for " + std::string(key),
              std::string(value));
}

double real_value(std::size_t line, std::string_view key, std::string_view value) {
  const auto v = parse_double(value);
  if (!v) bad_value(line, key, value);
  return *v;
}

int int_value(std::size_t line, std::string_view key, std::string_view value) {
  const auto v = parse_int(value);
  if (!v) bad_value(line, key, value);
  return static_cast<int>(*v);
}

bool bool_value(std::size_t line, std::string_view key, std::string_view value) {
  const std::string v = to_lower(value);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  bad_value(line, key, value);
}

fs::path path_value(const fs::path& base, std::string_view value) {
  fs::path p{std::string(value)};
  return p.is_relative() && !base.empty() ? base / p : p;
}

}  // namespace

fs::path AppConfig::resolved_asset_dir() const {
  return asset_dir.empty() ? fs::path(XGW_DEFAULT_ASSET_DIR) : asset_dir;
}

AppConfig parse_config(std::istream& in, const fs::path& base) {
  AppConfig c;
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string_view text = raw;
    if (const auto hash = text.find('#'); hash != std::string_view::npos) text = text.substr(0, hash);
    text = trim(text);
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::kConfiguration,
                  "config line " + std::to_string(line) + ": expected key = value");
    }
    const std::string_view key = trim(text.substr(0, eq));
    const std::string_view value = trim(text.substr(eq + 1));

    if (key == "data_root") c.data_root = path_value(base, value);
    else if (key == "cache_dir") c.cache_dir = path_value(base, value);
    else if (key == "asset_dir") c.asset_dir = path_value(base, value);
    else if (key == "include_penalties") c.ingest.include_penalties = bool_value(line, key, value);
    else if (key == "provider_pitch_length") c.ingest.pitch.length = real_value(line, key, value);
    else if (key == "provider_pitch_width") c.ingest.pitch.width = real_value(line, key, value);
    else if (key == "salience_threshold") c.salience_threshold = real_value(line, key, value);
    else if (key == "fit_on_demand") c.fit_on_demand = bool_value(line, key, value);
    else if (key == "eval.runs") c.eval_runs = int_value(line, key, value);
    else if (key == "eval.features") {
      c.eval_features.clear();
      for (std::string_view name : split(value, ',')) {
        const auto f = find_feature(trim(name));
        if (!f) bad_value(line, key, name);
        c.eval_features.push_back(*f);
      }
    }
    else if (key == "llm.provider") c.llm_provider = std::string(value);
    else if (key == "llm.endpoint_url") c.llm.endpoint_url = std::string(value);
    else if (key == "llm.model") c.llm.model_name = std::string(value);
    else if (key == "llm.api_key_env") c.llm.api_key_env_var = std::string(value);
    else if (key == "llm.temperature") c.llm.temperature = real_value(line, key, value);
    else if (key == "llm.judge_temperature") c.judge_temperature = real_value(line, key, value);
    else if (key == "llm.max_retries") c.llm.max_retries = int_value(line, key, value);
    else if (key == "llm.timeout") c.llm.timeout_seconds = real_value(line, key, value);
    else if (key == "llm.requests_per_minute") c.llm.requests_per_minute = real_value(line, key, value);
    else if (key == "llm.mock_script") c.mock_script = path_value(base, value);
    else if (key == "llm.mock_fallback") c.mock_fallback = std::string(value);
    else {
      throw Error(ErrorCode::kConfiguration,
                  "config line " + std::to_string(line) + ": unknown key " + std::string(key));
    }
  }
  return c;
}

AppConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kConfiguration, "cannot open config " + path.string());
  return parse_config(in, path.parent_path());
}

void apply_environment(AppConfig& config) {
  if (const char* root = std::getenv("DATA_ROOT"); root != nullptr && *root != '\0') {
    config.data_root = root;
  }
}

void validate(const AppConfig& c) {
  if (!(c.salience_threshold > 0.0)) {
    throw Error(ErrorCode::kConfiguration, "salience_threshold must be positive");
  }
  if (!(c.ingest.pitch.length > 0.0) || !(c.ingest.pitch.width > 0.0)) {
    throw Error(ErrorCode::kConfiguration, "provider pitch dimensions must be positive");
  }
  if (c.eval_runs < 1) throw Error(ErrorCode::kConfiguration, "eval.runs must be at least 1");
  if (c.llm_provider != "mock" && c.llm_provider != "http") {
    throw Error(ErrorCode::kConfiguration, "llm.provider must be mock or http", c.llm_provider);
  }
  xgw::validate(c.llm);
  if (!(c.judge_temperature >= 0.0)) {
    throw Error(ErrorCode::kConfiguration, "llm.judge_temperature must be >= 0");
  }
  for (const fs::path& dir : {c.shots_dir(), c.models_dir(), c.model_cards_dir()}) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
      throw Error(ErrorCode::kConfiguration, "cannot create cache directory " + dir.string(),
                  ec.message());
    }
  }
}

}  // namespace xgw::app

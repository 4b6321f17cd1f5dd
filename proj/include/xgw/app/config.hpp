#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "xgw/features.hpp"
#include "xgw/ingest.hpp"
#include "xgw/llm.hpp"

namespace xgw::app {

// Plain "key = value" file; '#' starts a comment. Keys:
//
//   data_root, cache_dir, asset_dir
//   include_penalties (true/false), provider_pitch_length, provider_pitch_width
//   salience_threshold, fit_on_demand
//   eval.runs, eval.features (comma separated feature names)
//   llm.provider (mock|http), llm.endpoint_url, llm.model, llm.api_key_env,
//   llm.temperature, llm.judge_temperature, llm.max_retries, llm.timeout,
//   llm.requests_per_minute, llm.mock_script, llm.mock_fallback
//
// Relative paths resolve against the config file's directory.
struct AppConfig {
  std::filesystem::path data_root = "data";
  std::filesystem::path cache_dir = "cache";
  std::filesystem::path asset_dir;  // empty: built-in asset directory
  IngestConfig ingest;
  double salience_threshold = 0.1;
  bool fit_on_demand = true;
  int eval_runs = 10;
  std::vector<Feature> eval_features{Feature::kDistanceToGoal, Feature::kSquaredDistanceToCenter};

  std::string llm_provider = "mock";
  LlmConfig llm;
  double judge_temperature = kJudgeTemperature;
  std::filesystem::path mock_script;
  std::string mock_fallback = std::string(MockProvider::kDefaultFallback);

  std::filesystem::path shots_dir() const { return cache_dir / "shots"; }
  std::filesystem::path models_dir() const { return cache_dir / "models"; }
  std::filesystem::path model_cards_dir() const { return cache_dir / "model_cards"; }
  std::filesystem::path resolved_asset_dir() const;
};

AppConfig parse_config(std::istream& in, const std::filesystem::path& base_dir = {});
AppConfig load_config(const std::filesystem::path& path);
// DATA_ROOT overrides data_root when set.
void apply_environment(AppConfig& config);
// Threshold > 0, provider known, cache directories creatable (created here).
void validate(const AppConfig& config);

}  // namespace xgw::app

#include "xgw/app/repository.hpp"

#include <algorithm>
#include <set>

#include "xgw/error.hpp"
#include "xgw/features.hpp"
#include "xgw/model_io.hpp"
#include "xgw/shots_table.hpp"

namespace xgw::app {
namespace fs = std::filesystem;

TrainingSet training_set(const std::vector<ShotEvent>& shots, const IngestConfig& config,
                         bool report_exclusions) {
  TrainingSet set;
  for (std::size_t i = 0; i < shots.size(); ++i) {
    const ShotEvent& s = shots[i];
    if (!s.frame_available || s.freeze_frame.empty()) continue;
    if (s.is_penalty() && !config.include_penalties) continue;
    try {
      set.features.push_back(build_feature_vector(s));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kFeatureUnavailable) throw;
      if (report_exclusions) warn("shot " + s.shot_id + " left out of the fit: " + e.what());
      ++set.excluded;
      continue;
    }
    set.rows.push_back(i);
    set.outcomes.push_back(s.outcome_is_goal ? 1 : 0);
  }
  return set;
}

Repository::Repository(AppConfig config) : config_(std::move(config)) {}

void Repository::check_id(std::string_view id) const {
  if (id.empty() || id == "." || id == ".." ||
      id.find_first_of("/\\") != std::string_view::npos) {
    throw Error(ErrorCode::kNotFound, "invalid competition id", std::string(id));
  }
}

fs::path Repository::shots_path(std::string_view id) const {
  return config_.shots_dir() / (std::string(id) + ".tsv");
}

fs::path Repository::model_path(std::string_view id) const {
  return config_.models_dir() / (std::string(id) + ".model");
}

std::vector<std::string> Repository::competition_ids() const {
  std::set<std::string> ids;
  std::error_code ec;
  if (fs::is_directory(config_.data_root, ec)) {
    for (const auto& entry : fs::directory_iterator(config_.data_root)) {
      if (entry.is_directory()) ids.insert(entry.path().filename().string());
    }
  }
  if (fs::is_directory(config_.shots_dir(), ec)) {
    for (const auto& entry : fs::directory_iterator(config_.shots_dir())) {
      if (entry.path().extension() == ".tsv") ids.insert(entry.path().stem().string());
    }
  }
  return {ids.begin(), ids.end()};
}

std::string Repository::competition_name(std::string_view id) const {
  check_id(id);
  return xgw::competition_name(config_.data_root, id);
}

std::vector<MatchInfo> Repository::matches(std::string_view id) const {
  check_id(id);
  if (fs::is_directory(config_.data_root / std::string(id))) {
    return list_matches(config_.data_root, id);
  }
  const fs::path cached = shots_path(id);
  if (!fs::exists(cached)) throw Error(ErrorCode::kNotFound, "unknown competition", std::string(id));
  std::vector<MatchInfo> out;
  std::set<std::string> seen;
  for (const ShotEvent& s : load_shots_table(cached)) {
    if (seen.insert(s.match_id).second) out.push_back({s.match_id, s.match_id});
  }
  return out;
}

Repository::Slot& Repository::slot(std::string_view id) {
  std::lock_guard lock(slots_mutex_);
  auto it = slots_.find(id);
  if (it == slots_.end()) it = slots_.emplace(std::string(id), std::make_unique<Slot>()).first;
  return *it->second;
}

std::vector<ShotEvent> Repository::ingest(std::string_view id) {
  check_id(id);
  Slot& s = slot(id);
  std::unique_lock lock(s.mutex);
  auto shots = ingest_competition(config_.data_root, id, config_.ingest);
  fs::create_directories(config_.shots_dir());
  save_shots_table(shots_path(id), shots);
  s.data.reset();
  return shots;
}

std::vector<ShotEvent> Repository::load_or_ingest_locked(std::string_view id) {
  const fs::path cached = shots_path(id);
  if (fs::exists(cached)) return load_shots_table(cached);
  auto shots = ingest_competition(config_.data_root, id, config_.ingest);
  fs::create_directories(config_.shots_dir());
  save_shots_table(cached, shots);
  return shots;
}

FitOutcome Repository::fit_locked(std::string_view id, const std::vector<ShotEvent>& shots) {
  const TrainingSet set = training_set(shots, config_.ingest);
  FitOutcome out{xgw::fit(set.features, set.outcomes, id), set.excluded};
  fs::create_directories(config_.models_dir());
  save_model(model_path(id), out.model);
  return out;
}

FitOutcome Repository::fit(std::string_view id) {
  check_id(id);
  Slot& s = slot(id);
  std::unique_lock lock(s.mutex);
  auto shots = load_or_ingest_locked(id);
  FitOutcome out = fit_locked(id, shots);
  s.data = build(id, std::move(shots), out.model);
  return out;
}

std::shared_ptr<const CompetitionData> Repository::build(std::string_view id,
                                                         std::vector<ShotEvent> shots,
                                                         FittedModel model) const {
  auto data = std::make_shared<CompetitionData>();
  data->id = std::string(id);
  data->name = xgw::competition_name(config_.data_root, id);
  const TrainingSet set = training_set(shots, config_.ingest, false);
  data->training_rows = set.rows;
  data->bands = compute_category_bands(set.features);
  data->features.resize(shots.size());
  for (std::size_t i = 0; i < shots.size(); ++i) {
    data->shot_index.emplace(shots[i].shot_id, i);
    if (!shots[i].frame_available) continue;
    try {
      data->features[i] = build_feature_vector(shots[i]);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kFeatureUnavailable) throw;
    }
  }
  data->shots = std::move(shots);
  data->model = std::move(model);
  return data;
}

std::shared_ptr<const CompetitionData> Repository::competition(std::string_view id) {
  check_id(id);
  Slot& s = slot(id);
  {
    std::shared_lock lock(s.mutex);
    if (s.data) return s.data;
  }
  std::unique_lock lock(s.mutex);
  if (s.data) return s.data;
  if (!fs::exists(shots_path(id)) && !fs::is_directory(config_.data_root / std::string(id))) {
    throw Error(ErrorCode::kNotFound, "unknown competition", std::string(id));
  }
  auto shots = load_or_ingest_locked(id);
  FittedModel model;
  if (fs::exists(model_path(id))) {
    model = load_model(model_path(id));
  } else if (config_.fit_on_demand) {
    model = fit_locked(id, shots).model;
  } else {
    throw Error(ErrorCode::kNotFound, "no fitted model for competition " + std::string(id),
                std::string(id));
  }
  s.data = build(id, std::move(shots), std::move(model));
  return s.data;
}

Repository::ShotRef Repository::find_shot(std::string_view shot_id) {
  for (const std::string& id : competition_ids()) {
    auto data = competition(id);
    if (const auto it = data->shot_index.find(std::string(shot_id)); it != data->shot_index.end()) {
      return {data, it->second};
    }
  }
  throw Error(ErrorCode::kNotFound, "shot not found", std::string(shot_id));
}

std::shared_ptr<const CompetitionData> Repository::competition_of_match(std::string_view match_id) {
  for (const std::string& id : competition_ids()) {
    for (const MatchInfo& m : matches(id)) {
      if (m.match_id == match_id) return competition(id);
    }
  }
  throw Error(ErrorCode::kNotFound, "match not found", std::string(match_id));
}

}  // namespace xgw::app

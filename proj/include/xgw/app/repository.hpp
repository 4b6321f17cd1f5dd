#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "xgw/app/config.hpp"
#include "xgw/explain.hpp"
#include "xgw/glm.hpp"
#include "xgw/ingest.hpp"
#include "xgw/shot.hpp"

namespace xgw::app {

// Immutable view of one competition: its shots, features and fitted model.
struct CompetitionData {
  std::string id;
  std::string name;
  std::vector<ShotEvent> shots;
  std::vector<std::optional<FeatureVector>> features;  // per shot, empty when unavailable
  std::vector<std::size_t> training_rows;              // shots that entered the fit
  FittedModel model;
  CategoryBands bands;
  std::unordered_map<std::string, std::size_t> shot_index;

  const ShotEvent& shot(std::size_t i) const { return shots.at(i); }
};

struct FitOutcome {
  FittedModel model;
  std::size_t excluded = 0;  // model shots dropped for unavailable features
};

// Shots selected for fitting and their feature vectors. Shots whose features
// cannot be computed are skipped with a warning.
struct TrainingSet {
  std::vector<std::size_t> rows;
  std::vector<FeatureVector> features;
  std::vector<int> outcomes;
  std::size_t excluded = 0;
};
TrainingSet training_set(const std::vector<ShotEvent>& shots, const IngestConfig& config,
                         bool report_exclusions = true);

// Per-competition cache over data_root and cache_dir. Ingest and fit hold an
// exclusive per-competition lock; readers get shared immutable snapshots.
class Repository {
 public:
  explicit Repository(AppConfig config);

  const AppConfig& config() const { return config_; }

  // Competition directories under data_root plus cached shot files, sorted.
  std::vector<std::string> competition_ids() const;
  std::string competition_name(std::string_view id) const;
  std::vector<MatchInfo> matches(std::string_view competition_id) const;

  // Parses data_root and writes shots/<id>.tsv.
  std::vector<ShotEvent> ingest(std::string_view competition_id);
  // Fits from the cached shots (ingesting first when absent) and writes models/<id>.model.
  FitOutcome fit(std::string_view competition_id);

  // Loads cached shots and model; fits when the model is missing and
  // fit_on_demand is set, otherwise kNotFound.
  std::shared_ptr<const CompetitionData> competition(std::string_view competition_id);

  struct ShotRef {
    std::shared_ptr<const CompetitionData> data;
    std::size_t index = 0;
    const ShotEvent& shot() const { return data->shot(index); }
  };
  ShotRef find_shot(std::string_view shot_id);
  // Competition holding the match; kNotFound when none does.
  std::shared_ptr<const CompetitionData> competition_of_match(std::string_view match_id);

  std::filesystem::path shots_path(std::string_view id) const;
  std::filesystem::path model_path(std::string_view id) const;

 private:
  struct Slot {
    std::shared_mutex mutex;
    std::shared_ptr<const CompetitionData> data;
  };
  Slot& slot(std::string_view id);
  std::vector<ShotEvent> load_or_ingest_locked(std::string_view id);
  FitOutcome fit_locked(std::string_view id, const std::vector<ShotEvent>& shots);
  std::shared_ptr<const CompetitionData> build(std::string_view id, std::vector<ShotEvent> shots,
                                               FittedModel model) const;
  void check_id(std::string_view id) const;

  AppConfig config_;
  mutable std::mutex slots_mutex_;
  std::map<std::string, std::unique_ptr<Slot>, std::less<>> slots_;
};

}  // namespace xgw::app

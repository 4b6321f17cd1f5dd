#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "xgw/features.hpp"
#include "xgw/glm.hpp"

namespace xgw {

enum class Direction { kPositive, kNegative, kNeutral };

// Ordered from worst to best chance.
enum class QualityCategory { kSlim, kLow, kDecent, kHighQuality, kExcellent };

std::string_view to_string(Direction direction);
std::string_view to_string(QualityCategory category);

inline constexpr double kDefaultSalienceThreshold = 0.1;

// Upper bounds (exclusive) of slim, low, decent and high-quality.
inline constexpr std::array<double, 4> kXgThresholds{0.028, 0.056, 0.096, 0.3};

struct FeatureContribution {
  std::string feature_name;
  double feature_value = 0.0;
  double contribution = 0.0;  // log-odds units, beta_j * (x_j - mean_j)
  Direction direction = Direction::kNeutral;
};

struct ShotExplanation {
  std::string shot_id;
  double xg = 0.0;
  double log_odds = 0.0;
  // intercept + sum_j beta_j * mean_j; log_odds = baseline + sum of contributions.
  double baseline_log_odds = 0.0;
  std::vector<FeatureContribution> contributions;  // schema order
  QualityCategory quality_category = QualityCategory::kSlim;
  std::vector<std::string> salient;  // non-neutral features, |contribution| descending
};

Direction classify_contribution(double contribution,
                                double threshold = kDefaultSalienceThreshold);

// Mean-centred contributions of every feature. The model must carry the
// fixed schema; a mismatch names the first divergent feature.
ShotExplanation explain_shot(const FittedModel& model, const FeatureVector& x,
                             std::string_view shot_id,
                             double salience_threshold = kDefaultSalienceThreshold);

// slim < 0.028 <= low < 0.056 <= decent < 0.096 <= high_quality < 0.3 <= excellent.
// Throws kContractViolation outside [0, 1].
QualityCategory categorize_xg(double xg);

inline constexpr std::array<double, 4> kBandPercentiles{25.0, 50.0, 75.0, 90.0};

// Per-competition empirical percentile cut points for the continuous
// features. Count and binary features are verbalised directly.
struct CategoryBands {
  std::array<double, 4> xg_thresholds = kXgThresholds;
  std::map<std::string, std::array<double, 4>, std::less<>> feature_percentiles;
};

// Linear-interpolation percentile of sorted data, q in [0, 100].
double percentile(std::span<const double> sorted, double q);
CategoryBands compute_category_bands(std::span<const FeatureVector> training);

// Bin 0..4; a value equal to a cut point falls in the upper bin.
int percentile_bin(const std::array<double, 4>& cuts, double value);

struct WordEntry {
  std::string label;     // noun phrase, e.g. "a moderate distance from the goal"
  std::string sentence;  // full sentence for the feature description
  std::string reason;    // clause completing "because ..."
};

// Editable word table: feature, bin key and the three texts. Bin keys are
// "0".."4" for percentile bins, integer counts with an optional "N+" catch-all
// for count features, "0"/"1" for flags, and "1"/"right_foot"/"head"/"other"
// for shot_with_left_foot.
class WordTable {
 public:
  static WordTable parse(std::istream& in);
  static WordTable load(const std::filesystem::path& path);

  // Throws kConfiguration naming feature and bin when absent.
  const WordEntry& lookup(std::string_view feature, std::string_view bin) const;
  bool contains(std::string_view feature, std::string_view bin) const;
  std::size_t size() const { return entries_.size(); }
  const std::map<std::pair<std::string, std::string>, WordEntry>& entries() const {
    return entries_;
  }

 private:
  std::map<std::pair<std::string, std::string>, WordEntry> entries_;
};

// Word label for a continuous feature's percentile bin. Unknown or
// non-continuous features are an error.
std::string feature_band(std::string_view feature_name, double value, const CategoryBands& bands,
                         const WordTable& words);

// Bin key used to look a feature value up in the word table.
std::string word_bin(Feature feature, double value, BodyPart body_part, const CategoryBands& bands);

const WordEntry& describe_feature(Feature feature, double value, BodyPart body_part,
                                  const CategoryBands& bands, const WordTable& words);

nlohmann::json explanation_to_json(const ShotExplanation& explanation);
nlohmann::json bands_to_json(const CategoryBands& bands);

}  // namespace xgw

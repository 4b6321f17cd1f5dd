#include "xgw/explain.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>

#include <nlohmann/json.hpp>

#include "xgw/error.hpp"
#include "xgw/text_format.hpp"

namespace xgw {

std::string_view to_string(Direction direction) {
  switch (direction) {
    case Direction::kPositive:
      return "positive";
    case Direction::kNegative:
      return "negative";
    case Direction::kNeutral:
      return "neutral";
  }
  return "neutral";
}

std::string_view to_string(QualityCategory category) {
  switch (category) {
    case QualityCategory::kSlim:
      return "slim";
    case QualityCategory::kLow:
      return "low";
    case QualityCategory::kDecent:
      return "decent";
    case QualityCategory::kHighQuality:
      return "high_quality";
    case QualityCategory::kExcellent:
      return "excellent";
  }
  return "slim";
}

Direction classify_contribution(double contribution, double threshold) {
  if (contribution > threshold) return Direction::kPositive;
  if (contribution < -threshold) return Direction::kNegative;
  return Direction::kNeutral;
}

ShotExplanation explain_shot(const FittedModel& model, const FeatureVector& x,
                             std::string_view shot_id, double salience_threshold) {
  for (std::size_t j = 0; j < kNumFeatures; ++j) {
    const std::string_view expected = kFeatureSchema[j].name;
    if (j >= model.num_features() || model.feature_names[j] != expected) {
      throw Error(ErrorCode::kSchemaMismatch,
                  "model schema diverges at feature '" + std::string(expected) + "'",
                  std::string(expected));
    }
  }
  if (model.num_features() != kNumFeatures) {
    throw Error(ErrorCode::kSchemaMismatch,
                "model has extra feature '" + model.feature_names[kNumFeatures] + "'",
                model.feature_names[kNumFeatures]);
  }

  ShotExplanation e;
  e.shot_id = std::string(shot_id);
  e.log_odds = predict_log_odds(model, x);
  e.xg = logistic(e.log_odds);
  e.baseline_log_odds = model.intercept;
  for (std::size_t j = 0; j < kNumFeatures; ++j) {
    e.baseline_log_odds += model.coefficients[j] * model.feature_means[j];
    const double c = model.coefficients[j] * (x.values[j] - model.feature_means[j]);
    e.contributions.push_back({model.feature_names[j], x.values[j], c,
                               classify_contribution(c, salience_threshold)});
  }
  e.quality_category = categorize_xg(e.xg);

  std::vector<std::size_t> order(kNumFeatures);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(e.contributions[a].contribution) > std::abs(e.contributions[b].contribution);
  });
  for (const std::size_t j : order) {
    if (e.contributions[j].direction != Direction::kNeutral) {
      e.salient.push_back(e.contributions[j].feature_name);
    }
  }
  return e;
}

QualityCategory categorize_xg(double xg) {
  if (!(xg >= 0.0 && xg <= 1.0)) {
    throw Error(ErrorCode::kContractViolation, "xG outside [0, 1]: " + format_double(xg));
  }
  std::size_t bin = 0;
  while (bin < kXgThresholds.size() && xg >= kXgThresholds[bin]) ++bin;
  return static_cast<QualityCategory>(bin);
}

double percentile(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw Error(ErrorCode::kContractViolation, "percentile of empty data");
  const double pos = q / 100.0 * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

CategoryBands compute_category_bands(std::span<const FeatureVector> training) {
  CategoryBands bands;
  if (training.empty()) return bands;
  for (std::size_t j = 0; j < kNumFeatures; ++j) {
    if (kFeatureSchema[j].kind != FeatureKind::kContinuous) continue;
    std::vector<double> column(training.size());
    for (std::size_t i = 0; i < training.size(); ++i) column[i] = training[i].values[j];
    std::sort(column.begin(), column.end());
    std::array<double, 4> cuts{};
    for (std::size_t k = 0; k < cuts.size(); ++k) cuts[k] = percentile(column, kBandPercentiles[k]);
    bands.feature_percentiles.emplace(std::string(kFeatureSchema[j].name), cuts);
  }
  return bands;
}

int percentile_bin(const std::array<double, 4>& cuts, double value) {
  int bin = 0;
  for (const double cut : cuts) {
    if (value >= cut) ++bin;
  }
  return bin;
}

WordTable WordTable::parse(std::istream& in) {
  WordTable table;
  std::string line;
  std::size_t row = 0;
  bool header = true;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    if (header) {
      header = false;
      continue;
    }
    const auto f = split(line, '\t');
    if (f.size() != 5) {
      throw Error(ErrorCode::kParse,
                  "word table row " + std::to_string(row) + ": expected 5 columns");
    }
    table.entries_[{std::string(f[0]), std::string(f[1])}] =
        WordEntry{unescape_field(f[2]), unescape_field(f[3]), unescape_field(f[4])};
  }
  return table;
}

WordTable WordTable::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kConfiguration, "cannot open word table " + path.string());
  return parse(in);
}

bool WordTable::contains(std::string_view feature, std::string_view bin) const {
  return entries_.count({std::string(feature), std::string(bin)}) != 0;
}

const WordEntry& WordTable::lookup(std::string_view feature, std::string_view bin) const {
  const auto it = entries_.find({std::string(feature), std::string(bin)});
  if (it == entries_.end()) {
    throw Error(ErrorCode::kConfiguration,
                "word table has no entry for feature '" + std::string(feature) + "' bin '" +
                    std::string(bin) + "'",
                std::string(feature) + ":" + std::string(bin));
  }
  return it->second;
}

std::string feature_band(std::string_view feature_name, double value, const CategoryBands& bands,
                         const WordTable& words) {
  const auto it = bands.feature_percentiles.find(feature_name);
  if (it == bands.feature_percentiles.end()) {
    throw Error(ErrorCode::kContractViolation,
                "no percentile bands for feature '" + std::string(feature_name) + "'");
  }
  return words.lookup(feature_name, std::to_string(percentile_bin(it->second, value))).label;
}

std::string word_bin(Feature feature, double value, BodyPart body_part,
                     const CategoryBands& bands) {
  const FeatureInfo& info = feature_info(feature);
  switch (info.kind) {
    case FeatureKind::kContinuous: {
      const auto it = bands.feature_percentiles.find(info.name);
      if (it == bands.feature_percentiles.end()) {
        throw Error(ErrorCode::kConfiguration,
                    "no percentile bands for feature '" + std::string(info.name) + "'");
      }
      return std::to_string(percentile_bin(it->second, value));
    }
    case FeatureKind::kCount:
      return std::to_string(static_cast<long long>(std::llround(value)));
    case FeatureKind::kBinary:
      if (feature == Feature::kShotWithLeftFoot && value == 0.0) {
        return body_part == BodyPart::kLeftFoot ? "other" : std::string(to_string(body_part));
      }
      return value != 0.0 ? "1" : "0";
  }
  return "0";
}

const WordEntry& describe_feature(Feature feature, double value, BodyPart body_part,
                                  const CategoryBands& bands, const WordTable& words) {
  const std::string_view name = feature_info(feature).name;
  std::string bin = word_bin(feature, value, body_part, bands);
  if (feature_info(feature).kind == FeatureKind::kCount && !words.contains(name, bin)) {
    // Fall back to the largest "N+" catch-all not above the value.
    for (long long k = std::llround(value); k >= 0; --k) {
      const std::string open = std::to_string(k) + "+";
      if (words.contains(name, open)) return words.lookup(name, open);
    }
  }
  return words.lookup(name, bin);
}

nlohmann::json explanation_to_json(const ShotExplanation& e) {
  nlohmann::json contributions = nlohmann::json::array();
  for (const FeatureContribution& c : e.contributions) {
    contributions.push_back({{"feature", c.feature_name},
                             {"value", c.feature_value},
                             {"contribution", c.contribution},
                             {"direction", to_string(c.direction)}});
  }
  return {{"shot_id", e.shot_id},
          {"xg", e.xg},
          {"log_odds", e.log_odds},
          {"baseline_log_odds", e.baseline_log_odds},
          {"quality_category", to_string(e.quality_category)},
          {"contributions", contributions},
          {"salient", e.salient}};
}

nlohmann::json bands_to_json(const CategoryBands& bands) {
  nlohmann::json features = nlohmann::json::object();
  for (const auto& [name, cuts] : bands.feature_percentiles) features[name] = cuts;
  return {{"xg_thresholds", bands.xg_thresholds},
          {"percentiles", kBandPercentiles},
          {"features", features}};
}

}  // namespace xgw

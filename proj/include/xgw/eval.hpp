#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "xgw/chat.hpp"
#include "xgw/explain.hpp"
#include "xgw/llm.hpp"
#include "xgw/prompt_assets.hpp"
#include "xgw/textgen.hpp"

namespace xgw {

enum class Label { kPositive, kNegative, kNotContributing };
std::string_view to_string(Label label);  // positive, negative, not_contributing

// Strictly above +threshold is positive, strictly below -threshold negative.
Label ground_truth_label(double contribution, double threshold = kDefaultSalienceThreshold);

std::vector<ChatMessage> engagement_messages(std::string_view text);
std::vector<ChatMessage> accuracy_messages(std::string_view text, Feature feature);

// First run of digits, clamped to [0, 5].
std::optional<int> parse_engagement(std::string_view reply);
// Case-insensitive; the label that appears earliest in the reply wins.
std::optional<Label> parse_label(std::string_view reply);

struct EvalShot {
  ShotExplanation explanation;
  SynthesizedText synth;
  FeatureVector x;
};

struct EvalOptions {
  std::vector<CaseId> cases{CaseId::kCase1, CaseId::kCase2, CaseId::kCase3, CaseId::kCase4,
                            CaseId::kCase5};
  int n_runs = 10;
  std::vector<Feature> features{Feature::kDistanceToGoal, Feature::kSquaredDistanceToCenter};
  double salience_threshold = kDefaultSalienceThreshold;
};

struct AccuracyResult {
  std::optional<double> mean;  // pooled over parseable judgments of all runs
  double std = 0.0;            // population std of the per-run fractions
  std::size_t n_judged = 0;
  std::size_t n_correct = 0;
  std::size_t n_unparseable = 0;
  std::size_t n_failed = 0;
};

struct EvaluationResult {
  CaseId case_id = CaseId::kCase1;
  std::optional<double> engagement_mean;  // mean of per-run means
  double engagement_std = 0.0;            // population std of per-run means
  std::size_t n_engagement = 0;
  std::size_t engagement_unparseable = 0;
  std::size_t engagement_failed = 0;
  std::size_t generation_failed = 0;
  std::map<std::string, AccuracyResult> accuracy_by_feature;
  std::size_t n_shots = 0;
  int n_runs = 0;
  std::vector<std::string> failures;  // first few gateway error messages
};

// `generator` is required when cases 3 or 4 are requested. Gateway errors are
// recorded per judgment and never abort the sweep.
std::vector<EvaluationResult> run_evaluation(std::span<const EvalShot> shots,
                                             const EvalOptions& options, const Gateway& judge,
                                             const Gateway* generator, const PromptAssets& assets);

// case<TAB>metric<TAB>mean<TAB>std<TAB>n, "NA" for absent means.
void write_results_table(std::ostream& out, std::span<const EvaluationResult> results);
// Grouped-bar layout: one series per metric, one bar per case.
nlohmann::json results_to_json(std::span<const EvaluationResult> results);

}  // namespace xgw

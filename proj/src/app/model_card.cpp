#include "xgw/app/model_card.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "xgw/error.hpp"
#include "xgw/explain.hpp"
#include "xgw/features.hpp"
#include "xgw/text_format.hpp"

namespace xgw::app {
namespace {

std::string number(double v, int decimals) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  return format_fixed(v, decimals);
}

std::string kind_name(FeatureKind kind) {
  switch (kind) {
    case FeatureKind::kContinuous: return "continuous";
    case FeatureKind::kCount: return "count";
    case FeatureKind::kBinary: return "binary";
  }
  return "";
}

}  // namespace

std::string generate_model_card(std::span<const FittedModel> models, const PromptAssets& assets,
                                const AppConfig& config,
                                const std::map<std::string, std::string>& names) {
  if (models.empty()) throw Error(ErrorCode::kContractViolation, "model card needs at least one model");
  std::vector<const FittedModel*> ordered;
  for (const FittedModel& m : models) ordered.push_back(&m);
  std::stable_sort(ordered.begin(), ordered.end(), [](const auto* a, const auto* b) {
    return a->competition_id < b->competition_id;
  });

  std::ostringstream md;
  md << "# Model card: expected goals with plain-language explanations\n\n";
  md << "## Overview\n\n"
     << "Logistic regression estimating the probability that a non-penalty shot is scored, "
        "fitted separately for each competition on the same feature schema. Each shot's "
        "prediction is split into per-feature contributions measured against the competition "
        "average, and those contributions are turned into text for a language model.\n\n";

  md << "## Data\n\n";
  md << "Event and freeze-frame data in the provider layout, one directory per competition.\n\n";
  md << "| competition | name | shots | goals |\n|---|---|---:|---:|\n";
  for (const FittedModel* m : ordered) {
    const auto it = names.find(m->competition_id);
    md << "| " << m->competition_id << " | "
       << (it != names.end() ? it->second : m->competition_id) << " | " << m->n_shots << " | "
       << m->n_goals << " |\n";
  }
  md << "\nPenalties are " << (config.ingest.include_penalties ? "included" : "excluded")
     << ". Shots without a freeze frame or without a visible goalkeeper are left out of fits.\n\n";

  md << "## Features\n\n| # | feature | description | unit | kind |\n|---:|---|---|---|---|\n";
  for (std::size_t j = 0; j < kNumFeatures; ++j) {
    const FeatureInfo& f = kFeatureSchema[j];
    md << "| " << j + 1 << " | " << f.name << " | " << f.display_name << " | " << f.unit << " | "
       << kind_name(f.kind) << " |\n";
  }
  md << '\n';

  md << "## Coefficients\n\n";
  for (const FittedModel* m : ordered) {
    const auto it = names.find(m->competition_id);
    md << "### " << (it != names.end() ? it->second : m->competition_id) << " ("
       << m->competition_id << ")\n\n";
    md << "n_shots: " << m->n_shots << ", n_goals: " << m->n_goals
       << ", log-likelihood: " << number(m->log_likelihood, 4)
       << ", converged: " << (m->converged ? "yes" : "no") << " after " << m->iterations
       << " iterations\n\n";
    md << "| term | coefficient | std. error | p-value | mean |\n|---|---:|---:|---:|---:|\n";
    md << "| intercept | " << number(m->intercept, 4) << " | " << number(m->standard_errors.at(0), 4)
       << " | " << number(m->p_values.at(0), 4) << " | |\n";
    for (std::size_t j = 0; j < m->num_features(); ++j) {
      md << "| " << m->feature_names[j] << " | " << number(m->coefficients[j], 4) << " | "
         << number(m->standard_errors.at(j + 1), 4) << " | " << number(m->p_values.at(j + 1), 4)
         << " | " << number(m->feature_means[j], 4) << " |\n";
    }
    if (!m->warnings.empty()) {
      md << "\nFit warnings:\n\n";
      for (const std::string& w : m->warnings) md << "- " << w << '\n';
    }
    md << '\n';
  }

  md << "## Chance categories\n\n| category | xG range |\n|---|---|\n";
  const char* category_names[] = {"slim", "low", "decent", "high_quality", "excellent"};
  for (std::size_t k = 0; k < 5; ++k) {
    const std::string lo = k == 0 ? "0" : format_double(kXgThresholds[k - 1]);
    const std::string hi = k == 4 ? "1" : format_double(kXgThresholds[k]);
    md << "| " << category_names[k] << " | [" << lo << ", " << hi << (k == 4 ? "]" : ")") << " |\n";
  }
  md << "\nA feature counts as salient when its contribution exceeds +"
     << format_double(config.salience_threshold) << " or falls below -"
     << format_double(config.salience_threshold)
     << " log-odds. Values exactly on the threshold are treated as not contributing.\n\n";

  md << "## Prompt assets\n\n"
     << "- persona: " << (assets.persona.empty() ? "missing" : "present") << '\n'
     << "- question/answer pairs: " << assets.qa_pairs.size() << '\n'
     << "- few-shot examples: " << assets.few_shot.size() << '\n'
     << "- answer instruction: " << (assets.instruction.empty() ? "missing" : "present") << "\n\n"
     << "The persona and instruction texts are written for this implementation and are "
        "editable files.\n\n";

  md << "## Limitations\n\n"
     << "- Dataset bias: each model only reflects the teams, styles and sample size of one "
        "competition. Small tournaments give wide standard errors.\n"
     << "- Visibility: freeze frames only contain players in camera view, so defender counts "
        "and nearest-opponent distances can be understated.\n"
     << "- Feature sensitivity: several features are correlated (for instance the two "
        "distance measures), so individual coefficients and contributions can shift between "
        "competitions while the predicted xG stays similar.\n"
     << "- Feature list: goalkeeper distance to goal is kept in the schema although a "
        "significance screen would suggest dropping it; the fixed list is used for every "
        "competition so explanations stay comparable.\n"
     << "- Linearity: contributions are additive in log-odds, so interactions such as a "
        "header from a wide angle are not modelled.\n"
     << "- Generated commentary depends on the language model and can contain statements that "
        "are not supported by the data.\n";
  return md.str();
}

}  // namespace xgw::app

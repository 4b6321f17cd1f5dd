#pragma once

#include <string>

#include "xgw/chat.hpp"
#include "xgw/explain.hpp"
#include "xgw/prompt_assets.hpp"
#include "xgw/shot.hpp"

namespace xgw {

// Three-part plain-language description of one shot.
struct SynthesizedText {
  std::string quality_section;        // outcome, xG and chance category
  std::string features_section;       // one banded sentence per feature, no raw values
  std::string contributions_section;  // salient features in |contribution| order

  friend bool operator==(const SynthesizedText&, const SynthesizedText&) = default;
};

SynthesizedText synthesize(const ShotExplanation& explanation, const ShotEvent& shot,
                           const CategoryBands& bands, const WordTable& words);

// "name: value" lines for the 11 features, schema order.
std::string numeric_feature_lines(const FeatureVector& x);

// The text a case puts in its data message (and that the judge evaluates for
// cases 1, 2 and 5).
std::string case_data_text(CaseId id, const SynthesizedText& synth, const FeatureVector& x);

// case1/2/5: single user data message. case3: persona + data.
// case4: persona, Q/A pairs, few-shot pairs, data, instruction.
PromptBundle assemble_prompt(CaseId id, const SynthesizedText& synth, const FeatureVector& x,
                             const PromptAssets& assets);

}  // namespace xgw

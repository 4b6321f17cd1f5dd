#include "xgw/textgen.hpp"

#include <cmath>
#include <string>

#include "xgw/error.hpp"
#include "xgw/text_format.hpp"

namespace xgw {
namespace {

// Flags first, then the spatial and pressure features.
constexpr Feature kDescriptionOrder[] = {
    Feature::kShotWithLeftFoot,        Feature::kShotAfterThrowIn,
    Feature::kShotAfterCorner,         Feature::kShotAfterFreeKick,
    Feature::kSquaredDistanceToCenter, Feature::kDistanceToGoal,
    Feature::kNearbyOpponents3m,       Feature::kOpponentsInTriangle,
    Feature::kGkDistanceToGoal,        Feature::kDistanceToNearestOpponent,
    Feature::kAngleToGk,
};

void append_sentence(std::string& text, std::string_view sentence) {
  if (sentence.empty()) return;
  if (!text.empty()) text += ' ';
  text += sentence;
}

double value_of(const ShotExplanation& e, Feature f) {
  return e.contributions.at(static_cast<std::size_t>(f)).feature_value;
}

}  // namespace

SynthesizedText synthesize(const ShotExplanation& e, const ShotEvent& shot,
                           const CategoryBands& bands, const WordTable& words) {
  if (e.shot_id != shot.shot_id) {
    throw Error(ErrorCode::kContractViolation,
                "explanation " + e.shot_id + " does not belong to shot " + shot.shot_id);
  }
  if (e.contributions.size() != kNumFeatures) {
    throw Error(ErrorCode::kSchemaMismatch, "explanation does not carry the feature schema");
  }
  SynthesizedText out;

  const std::string shooter = shot.player_name.empty() ? "The player" : shot.player_name;
  const std::string team = shot.team_name.empty() ? "" : " from " + shot.team_name;
  out.quality_section = shooter + "'s shot" + team +
                        (shot.outcome_is_goal ? " was a goal!" : " did not result in a goal.");
  out.quality_section += " This shot had an xG value of " + format_fixed(e.xg, 2) +
                         ", which means that we estimate the chance of scoring from this "
                         "situation as " +
                         std::to_string(std::llround(e.xg * 100.0)) + "%.";
  append_sentence(out.quality_section,
                  words.lookup("xg_category", to_string(e.quality_category)).sentence);

  for (const Feature f : kDescriptionOrder) {
    append_sentence(out.features_section,
                    describe_feature(f, value_of(e, f), shot.body_part, bands, words).sentence);
  }

  if (e.salient.empty()) {
    out.contributions_section =
        "No single feature stood out: every feature's contribution to the xG of the shot was "
        "small, so the chance was close to a typical shot in this competition.";
    return out;
  }
  out.contributions_section =
      "The contributions of the features to the xG of the shot, sorted by their magnitude from "
      "largest to smallest, are as follows:";
  for (std::size_t k = 0; k < e.salient.size(); ++k) {
    const Feature f = *find_feature(e.salient[k]);
    const FeatureContribution& c = e.contributions[static_cast<std::size_t>(f)];
    const bool positive = c.direction == Direction::kPositive;
    const WordEntry& entry = describe_feature(f, c.feature_value, shot.body_part, bands, words);
    std::string sentence = k == 0 ? "The most impactful feature is " : "Another impactful feature is ";
    sentence += std::string(feature_info(f).display_name) + ", which had a " +
                (positive ? "positive" : "negative") + " contribution because " + entry.reason +
                ". This feature " + (positive ? "increased" : "decreased") + " the xG of the shot.";
    append_sentence(out.contributions_section, sentence);
  }
  return out;
}

std::string numeric_feature_lines(const FeatureVector& x) {
  std::string out;
  for (std::size_t j = 0; j < kNumFeatures; ++j) {
    if (j) out += '\n';
    out += std::string(kFeatureSchema[j].name) + ": " + format_double(x.values[j]);
  }
  return out;
}

std::string case_data_text(CaseId id, const SynthesizedText& synth, const FeatureVector& x) {
  switch (id) {
    case CaseId::kCase1:
      return synth.quality_section + "\n" + synth.features_section;
    case CaseId::kCase5:
      return numeric_feature_lines(x);
    case CaseId::kCase2:
    case CaseId::kCase3:
    case CaseId::kCase4:
      return synth.quality_section + "\n" + synth.features_section + "\n" +
             synth.contributions_section;
  }
  return {};
}

PromptBundle assemble_prompt(CaseId id, const SynthesizedText& synth, const FeatureVector& x,
                             const PromptAssets& assets) {
  PromptBundle bundle;
  bundle.case_id = id;
  auto& m = bundle.messages;
  const std::string data = case_data_text(id, synth, x);

  if (!requires_generation(id)) {
    m.push_back({Role::kUser, data, MessageStage::kData});
    return bundle;
  }
  if (id == CaseId::kCase4) {
    if (assets.qa_pairs.empty()) {
      throw Error(ErrorCode::kConfiguration, "case4 needs at least one question/answer pair");
    }
    if (assets.few_shot.empty()) {
      throw Error(ErrorCode::kConfiguration, "case4 needs at least one few-shot example");
    }
    if (assets.instruction.empty()) {
      throw Error(ErrorCode::kConfiguration, "case4 needs an instruction text");
    }
  }
  if (assets.persona.empty()) {
    throw Error(ErrorCode::kConfiguration, "persona text is empty");
  }

  m.push_back({Role::kSystem, assets.persona, MessageStage::kPersona});
  if (id == CaseId::kCase4) {
    for (const QaPair& qa : assets.qa_pairs) {
      m.push_back({Role::kUser, qa.question, MessageStage::kKnowledge});
      m.push_back({Role::kAssistant, qa.answer, MessageStage::kKnowledge});
    }
    for (const FewShotExample& ex : assets.few_shot) {
      m.push_back({Role::kUser, ex.synthesized_text, MessageStage::kExample});
      m.push_back({Role::kAssistant, ex.example_output, MessageStage::kExample});
    }
  }
  m.push_back({Role::kUser, data, MessageStage::kData});
  if (id == CaseId::kCase4) {
    m.push_back({Role::kUser, assets.instruction, MessageStage::kInstruction});
  }
  return bundle;
}

}  // namespace xgw

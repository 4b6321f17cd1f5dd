#include <doctest.h>

#include <algorithm>
#include <cctype>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "support.hpp"
#include "xgw/textgen.hpp"

using namespace xgw;

namespace {

const WordTable& words() {
  static const WordTable w = WordTable::load(test::asset_dir() / "word_tables.tsv");
  return w;
}

const PromptAssets& assets() {
  static const PromptAssets a = load_prompt_assets(PromptAssetPaths::in_directory(test::asset_dir()));
  return a;
}

CategoryBands bands() {
  CategoryBands b;
  b.feature_percentiles["squared_distance_to_center"] = {4, 16, 49, 100};
  b.feature_percentiles["distance_to_goal"] = {9, 13, 18, 24};
  b.feature_percentiles["gk_distance_to_goal"] = {0.8, 1.5, 2.5, 4};
  b.feature_percentiles["distance_to_nearest_opponent"] = {0.9, 1.6, 2.6, 4};
  b.feature_percentiles["angle_to_gk"] = {30, 55, 75, 85};
  return b;
}

FittedModel schema_model(double intercept, std::vector<double> coef, std::vector<double> means) {
  FittedModel m;
  m.competition_id = "c";
  for (const FeatureInfo& info : kFeatureSchema) m.feature_names.emplace_back(info.name);
  m.intercept = intercept;
  m.coefficients = std::move(coef);
  m.feature_means = std::move(means);
  m.standard_errors.assign(kNumFeatures + 1, 1.0);
  m.p_values.assign(kNumFeatures + 1, 0.5);
  return m;
}

ShotEvent shot(BodyPart part = BodyPart::kRightFoot) {
  ShotEvent s;
  s.shot_id = "shot-1";
  s.player_name = "Ana Ruiz";
  s.team_name = "Blue City";
  s.outcome_is_goal = true;
  s.body_part = part;
  return s;
}

FeatureVector example_vector() {
  FeatureVector x;
  const double v[] = {0, 11, 0, 2, 0.5, 4, 90, 0, 0, 0, 0};
  std::copy(std::begin(v), std::end(v), x.values.begin());
  return x;
}

FittedModel example_model() {
  return schema_model(-1.0, {-0.01, -0.1, -0.2, -0.3, 0.1, 0.05, 0.01, 0.1, 0.2, -0.1, 0.3},
                      {20, 15, 0.5, 1.5, 1.5, 2.0, 60, 0.3, 0.1, 0.1, 0.05});
}

int count_sentences(const std::string& text, const std::string& needle) {
  int n = 0;
  for (std::size_t pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
  return n;
}

}  // namespace

TEST_CASE("shipped assets load with the expected counts") {
  CHECK(assets().qa_pairs.size() == 43);
  CHECK(assets().few_shot.size() == 3);
  CHECK_FALSE(assets().persona.empty());
  CHECK_FALSE(assets().instruction.empty());
}

TEST_CASE("quality section") {
  const FeatureVector x = example_vector();
  const ShotExplanation e = explain_shot(example_model(), x, "shot-1");
  const SynthesizedText t = synthesize(e, shot(), bands(), words());
  CHECK(t.quality_section.find("Ana Ruiz") != std::string::npos);
  CHECK(t.quality_section.find("Blue City") != std::string::npos);
  CHECK(t.quality_section.find("was a goal") != std::string::npos);
  const std::string category_sentence = words().lookup("xg_category", to_string(e.quality_category)).sentence;
  CHECK(t.quality_section.find(category_sentence) != std::string::npos);
  char two[16];
  std::snprintf(two, sizeof two, "%.2f", e.xg);
  CHECK(t.quality_section.find(std::string("xG value of ") + two) != std::string::npos);
  CHECK(t.quality_section.find(std::to_string(std::llround(e.xg * 100)) + "%") != std::string::npos);

  ShotEvent miss = shot();
  miss.outcome_is_goal = false;
  CHECK(synthesize(e, miss, bands(), words()).quality_section.find("did not result in a goal") != std::string::npos);
}

TEST_CASE("features section wording") {
  const FeatureVector x = example_vector();
  FeatureVector left = x;
  left[Feature::kShotWithLeftFoot] = 1.0;
  const FittedModel m = example_model();
  const SynthesizedText t = synthesize(explain_shot(m, left, "shot-1"), shot(BodyPart::kLeftFoot), bands(), words());
  CHECK(t.features_section.find("The shot was taken with the left foot.") != std::string::npos);
  for (char c : t.features_section) CHECK_FALSE(std::isdigit(static_cast<unsigned char>(c)));
  CHECK(t.features_section.find("The shot was taken close to the goal.") != std::string::npos);
}

TEST_CASE("no numerals leak into features sections") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0, 120);
  const FittedModel m = example_model();
  const BodyPart parts[] = {BodyPart::kLeftFoot, BodyPart::kRightFoot, BodyPart::kHead, BodyPart::kOther};
  for (int trial = 0; trial < 300; ++trial) {
    FeatureVector x;
    for (std::size_t j = 0; j < 7; ++j) x.values[j] = u(rng);
    x[Feature::kNearbyOpponents3m] = static_cast<double>(rng() % 6);
    x[Feature::kOpponentsInTriangle] = static_cast<double>(rng() % 5);
    const BodyPart part = parts[rng() % 4];
    x[Feature::kShotWithLeftFoot] = part == BodyPart::kLeftFoot ? 1.0 : 0.0;
    x.values[8 + rng() % 3] = rng() % 2 == 0 ? 1.0 : 0.0;
    const SynthesizedText t = synthesize(explain_shot(m, x, "shot-1"), shot(part), bands(), words());
    CHECK(std::none_of(t.features_section.begin(), t.features_section.end(),
                       [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }));
  }
}

TEST_CASE("contribution sentences are a bijection with the salient list") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0, 30);
  const FittedModel m = example_model();
  for (int trial = 0; trial < 200; ++trial) {
    FeatureVector x;
    for (std::size_t j = 0; j < 7; ++j) x.values[j] = u(rng);
    const ShotExplanation e = explain_shot(m, x, "shot-1");
    const SynthesizedText t = synthesize(e, shot(), bands(), words());
    const int sentences = count_sentences(t.contributions_section, "impactful feature is ");
    CHECK(sentences == static_cast<int>(e.salient.size()));
    std::size_t last = 0;
    for (const std::string& name : e.salient) {
      const auto info = feature_info(*find_feature(name));
      const std::size_t pos = t.contributions_section.find(std::string(info.display_name) + ", which had");
      REQUIRE(pos != std::string::npos);
      CHECK(pos >= last);
      last = pos;
    }
    CHECK(count_sentences(t.contributions_section, "increased the xG") +
              count_sentences(t.contributions_section, "decreased the xG") ==
          sentences);
  }
}

TEST_CASE("no salient feature") {
  FittedModel m = example_model();
  FeatureVector x;
  std::copy(m.feature_means.begin(), m.feature_means.end(), x.values.begin());
  const SynthesizedText t = synthesize(explain_shot(m, x, "shot-1"), shot(), bands(), words());
  CHECK(t.contributions_section.find("No single feature stood out") == 0);
}

TEST_CASE("mismatched shot ids are rejected") {
  const ShotExplanation e = explain_shot(example_model(), example_vector(), "other");
  try {
    synthesize(e, shot(), bands(), words());
    FAIL("expected an error");
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::kContractViolation);
  }
}

TEST_CASE("missing word table rows are configuration errors") {
  std::istringstream tiny("feature\tbin\tlabel\tsentence\treason\nxg_category\thigh_quality\tl\ts\tr\n");
  const WordTable partial = WordTable::parse(tiny);
  try {
    synthesize(explain_shot(example_model(), example_vector(), "shot-1"), shot(), bands(), partial);
    FAIL("expected an error");
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::kConfiguration);
  }
}

TEST_CASE("case five lists the numeric values") {
  const FeatureVector x = example_vector();
  const SynthesizedText t = synthesize(explain_shot(example_model(), x, "shot-1"), shot(), bands(), words());
  const PromptBundle b = assemble_prompt(CaseId::kCase5, t, x, assets());
  REQUIRE(b.messages.size() == 1);
  CHECK(b.messages[0].role == Role::kUser);
  std::istringstream lines(b.messages[0].content);
  std::string line;
  std::size_t j = 0;
  while (std::getline(lines, line)) {
    REQUIRE(j < kNumFeatures);
    CHECK(line.rfind(std::string(kFeatureSchema[j].name) + ": ", 0) == 0);
    ++j;
  }
  CHECK(j == kNumFeatures);
  CHECK(b.messages[0].content.find("distance_to_goal: 11\n") != std::string::npos);
  CHECK(b.messages[0].content.find("gk_distance_to_goal: 0.5\n") != std::string::npos);
}

TEST_CASE("case structures") {
  const FeatureVector x = example_vector();
  const SynthesizedText t = synthesize(explain_shot(example_model(), x, "shot-1"), shot(), bands(), words());
  const PromptBundle c1 = assemble_prompt(CaseId::kCase1, t, x, assets());
  const PromptBundle c2 = assemble_prompt(CaseId::kCase2, t, x, assets());
  REQUIRE(c1.messages.size() == 1);
  REQUIRE(c2.messages.size() == 1);
  CHECK(c1.messages[0].content == t.quality_section + "\n" + t.features_section);
  CHECK(c2.messages[0].content.rfind(c1.messages[0].content, 0) == 0);
  CHECK(c2.messages[0].content.substr(c1.messages[0].content.size()) == "\n" + t.contributions_section);

  const PromptBundle c3 = assemble_prompt(CaseId::kCase3, t, x, assets());
  REQUIRE(c3.messages.size() == 2);
  CHECK(c3.messages[0].role == Role::kSystem);
  CHECK(c3.messages[0].content == assets().persona);
  CHECK(c3.messages[1].content == c2.messages[0].content);

  const PromptBundle c4 = assemble_prompt(CaseId::kCase4, t, x, assets());
  const std::size_t qa = assets().qa_pairs.size(), fs = assets().few_shot.size();
  REQUIRE(c4.messages.size() == 1 + 2 * qa + 2 * fs + 2);
  CHECK(c4.messages[0].stage == MessageStage::kPersona);
  std::size_t k = 1;
  for (std::size_t i = 0; i < qa; ++i, k += 2) {
    CHECK(c4.messages[k].role == Role::kUser);
    CHECK(c4.messages[k].content == assets().qa_pairs[i].question);
    CHECK(c4.messages[k + 1].role == Role::kAssistant);
    CHECK(c4.messages[k + 1].content == assets().qa_pairs[i].answer);
  }
  int example_turns = 0;
  for (std::size_t i = 0; i < fs; ++i, k += 2) {
    CHECK(c4.messages[k].stage == MessageStage::kExample);
    CHECK(c4.messages[k].content == assets().few_shot[i].synthesized_text);
    CHECK(c4.messages[k + 1].role == Role::kAssistant);
    example_turns += c4.messages[k + 1].stage == MessageStage::kExample ? 1 : 0;
  }
  CHECK(example_turns == 3);
  CHECK(c4.messages[k].stage == MessageStage::kData);
  CHECK(c4.messages[k].content == c2.messages[0].content);
  CHECK(c4.messages[k + 1].stage == MessageStage::kInstruction);
  CHECK(c4.messages[k + 1].content == assets().instruction);

  CHECK(assemble_prompt(CaseId::kCase4, t, x, assets()) == c4);
}

TEST_CASE("empty asset parts reject case four only") {
  const FeatureVector x = example_vector();
  const SynthesizedText t = synthesize(explain_shot(example_model(), x, "shot-1"), shot(), bands(), words());
  PromptAssets no_examples = assets();
  no_examples.few_shot.clear();
  PromptAssets no_qa = assets();
  no_qa.qa_pairs.clear();
  for (const PromptAssets* a : {&no_examples, &no_qa}) {
    try {
      assemble_prompt(CaseId::kCase4, t, x, *a);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kConfiguration);
    }
    for (CaseId id : {CaseId::kCase1, CaseId::kCase2, CaseId::kCase3, CaseId::kCase5}) {
      CHECK_NOTHROW(assemble_prompt(id, t, x, *a));
    }
  }
}

TEST_CASE("prompt asset tables") {
  std::vector<std::string> warnings;
  std::istringstream qa("question\tanswer\nWhat is xG?\tA probability.\nWhat is xG?\tAgain.\nLine\\nbreak\tTab\\there\n");
  const auto pairs = parse_qa_table(qa, &warnings);
  REQUIRE(pairs.size() == 3);
  CHECK(pairs[1].answer == "Again.");
  CHECK(pairs[2].question == "Line\nbreak");
  CHECK(pairs[2].answer == "Tab\there");
  CHECK(warnings.size() == 1);

  std::istringstream bad("question\tanswer\nonly one field\n");
  try {
    parse_qa_table(bad);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kParse);
    CHECK(std::string(e.what()).find("2") != std::string::npos);
  }
  std::istringstream fs("synthesized_text\texample_output\na\tb\n");
  CHECK(parse_few_shot_table(fs).size() == 1);
}

TEST_CASE("chat helpers") {
  CHECK(parse_case_id("case4") == CaseId::kCase4);
  CHECK(parse_case_id("2") == CaseId::kCase2);
  CHECK_FALSE(parse_case_id("case6"));
  CHECK(requires_generation(CaseId::kCase3));
  CHECK_FALSE(requires_generation(CaseId::kCase5));
  const std::vector<ChatMessage> a{{Role::kUser, "hi", MessageStage::kData}};
  const std::vector<ChatMessage> b{{Role::kUser, "hi", MessageStage::kJudge}};
  const std::vector<ChatMessage> c{{Role::kSystem, "hi", MessageStage::kData}};
  CHECK(fingerprint(a) == fingerprint(b));
  CHECK(fingerprint(a) != fingerprint(c));
  CHECK(fingerprint(a).size() == 16);
  const nlohmann::json j = messages_to_json(a);
  CHECK(j[0]["role"] == "user");
  CHECK_FALSE(j[0].contains("stage"));
}

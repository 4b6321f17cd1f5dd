#include "xgw/eval.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <ostream>

#include "xgw/error.hpp"
#include "xgw/text_format.hpp"

namespace xgw {
namespace {

constexpr std::size_t kMaxRecordedFailures = 5;

struct RunTally {
  long long engagement_sum = 0;
  std::size_t engagement_n = 0;
  std::map<std::string, std::pair<std::size_t, std::size_t>> accuracy;  // correct, judged
};

std::pair<double, double> mean_and_std(const std::vector<double>& values) {
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / static_cast<double>(values.size()))};
}

void note_failure(EvaluationResult& r, const std::string& message) {
  if (r.failures.size() < kMaxRecordedFailures) r.failures.push_back(message);
}

}  // namespace

std::string_view to_string(Label label) {
  switch (label) {
    case Label::kPositive: return "positive";
    case Label::kNegative: return "negative";
    case Label::kNotContributing: return "not_contributing";
  }
  return "not_contributing";
}

Label ground_truth_label(double contribution, double threshold) {
  if (!std::isfinite(contribution)) {
    throw Error(ErrorCode::kContractViolation, "contribution is not finite");
  }
  if (contribution > threshold) return Label::kPositive;
  if (contribution < -threshold) return Label::kNegative;
  return Label::kNotContributing;
}

std::vector<ChatMessage> engagement_messages(std::string_view text) {
  std::string prompt(text);
  prompt += "\n\nRank this text on a scale from 0 to 5 for how interesting and engaging it is.";
  return {{Role::kUser, std::move(prompt), MessageStage::kJudge}};
}

std::vector<ChatMessage> accuracy_messages(std::string_view text, Feature feature) {
  std::string prompt = "In the following text \"";
  prompt += text;
  prompt += "\" was ";
  prompt += feature_info(feature).display_name;
  prompt +=
      " a positive, negative, or not contributing factor? Respond with one of ['positive', "
      "'negative', 'not contributing']";
  return {{Role::kUser, std::move(prompt), MessageStage::kJudge}};
}

std::optional<int> parse_engagement(std::string_view reply) {
  const auto begin = std::find_if(reply.begin(), reply.end(),
                                  [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
  if (begin == reply.end()) return std::nullopt;
  const auto end = std::find_if(begin, reply.end(),
                                [](char c) { return !std::isdigit(static_cast<unsigned char>(c)); });
  // Long digit runs only need to compare above 5.
  const std::string_view digits(&*begin, static_cast<std::size_t>(end - begin));
  const std::string_view head = digits.substr(0, 3);
  const long long value = *parse_int(head);
  return static_cast<int>(std::clamp<long long>(digits.size() > 3 ? 999 : value, 0, 5));
}

std::optional<Label> parse_label(std::string_view reply) {
  std::string text = to_lower(reply);
  std::replace(text.begin(), text.end(), '_', ' ');
  std::replace(text.begin(), text.end(), '-', ' ');
  std::optional<Label> best;
  std::size_t best_pos = std::string::npos;
  const std::pair<std::string_view, Label> labels[] = {{"positive", Label::kPositive},
                                                       {"negative", Label::kNegative},
                                                       {"not contributing", Label::kNotContributing}};
  for (const auto& [word, label] : labels) {
    const std::size_t pos = text.find(word);
    if (pos < best_pos) {
      best_pos = pos;
      best = label;
    }
  }
  return best;
}

std::vector<EvaluationResult> run_evaluation(std::span<const EvalShot> shots,
                                             const EvalOptions& options, const Gateway& judge,
                                             const Gateway* generator, const PromptAssets& assets) {
  if (options.n_runs < 1) throw Error(ErrorCode::kConfiguration, "n_runs must be at least 1");
  if (options.cases.empty()) throw Error(ErrorCode::kConfiguration, "no cases to evaluate");
  for (CaseId id : options.cases) {
    if (requires_generation(id) && generator == nullptr) {
      throw Error(ErrorCode::kConfiguration,
                  std::string(to_string(id)) + " needs a generation provider");
    }
  }
  const double judge_temperature = judge.config().temperature;

  std::vector<EvaluationResult> results;
  for (CaseId id : options.cases) {
    EvaluationResult r;
    r.case_id = id;
    r.n_shots = shots.size();
    r.n_runs = options.n_runs;
    for (Feature f : options.features) r.accuracy_by_feature[std::string(feature_info(f).name)];

    std::vector<RunTally> runs(static_cast<std::size_t>(options.n_runs));
    for (int run = 0; run < options.n_runs; ++run) {
      RunTally& tally = runs[static_cast<std::size_t>(run)];
      for (const EvalShot& shot : shots) {
        std::string text;
        if (requires_generation(id)) {
          try {
            text = generator->chat(assemble_prompt(id, shot.synth, shot.x, assets)).text;
          } catch (const Error& e) {
            if (e.code() != ErrorCode::kGateway) throw;
            ++r.generation_failed;
            ++r.engagement_failed;
            for (auto& [name, acc] : r.accuracy_by_feature) ++acc.n_failed;
            note_failure(r, e.what());
            continue;
          }
        } else {
          text = case_data_text(id, shot.synth, shot.x);
        }

        try {
          const auto score = parse_engagement(judge.chat(engagement_messages(text), judge_temperature).text);
          if (score) {
            tally.engagement_sum += *score;
            ++tally.engagement_n;
          } else {
            ++r.engagement_unparseable;
          }
        } catch (const Error& e) {
          if (e.code() != ErrorCode::kGateway) throw;
          ++r.engagement_failed;
          note_failure(r, e.what());
        }

        for (Feature f : options.features) {
          const std::string name(feature_info(f).name);
          AccuracyResult& acc = r.accuracy_by_feature[name];
          const double contribution =
              shot.explanation.contributions.at(static_cast<std::size_t>(f)).contribution;
          const Label truth = ground_truth_label(contribution, options.salience_threshold);
          try {
            const auto label = parse_label(judge.chat(accuracy_messages(text, f), judge_temperature).text);
            if (!label) {
              ++acc.n_unparseable;
              continue;
            }
            auto& [correct, judged] = tally.accuracy[name];
            ++judged;
            if (*label == truth) ++correct;
          } catch (const Error& e) {
            if (e.code() != ErrorCode::kGateway) throw;
            ++acc.n_failed;
            note_failure(r, e.what());
          }
        }
      }
    }

    std::vector<double> run_means;
    for (const RunTally& t : runs) {
      r.n_engagement += t.engagement_n;
      if (t.engagement_n > 0) {
        run_means.push_back(static_cast<double>(t.engagement_sum) /
                            static_cast<double>(t.engagement_n));
      }
    }
    if (!run_means.empty()) {
      const auto [mean, std] = mean_and_std(run_means);
      r.engagement_mean = mean;
      r.engagement_std = std;
    }

    for (auto& [name, acc] : r.accuracy_by_feature) {
      std::vector<double> fractions;
      for (const RunTally& t : runs) {
        const auto it = t.accuracy.find(name);
        if (it == t.accuracy.end() || it->second.second == 0) continue;
        acc.n_correct += it->second.first;
        acc.n_judged += it->second.second;
        fractions.push_back(static_cast<double>(it->second.first) /
                            static_cast<double>(it->second.second));
      }
      if (acc.n_judged > 0) {
        acc.mean = static_cast<double>(acc.n_correct) / static_cast<double>(acc.n_judged);
        acc.std = mean_and_std(fractions).second;
      }
    }
    results.push_back(std::move(r));
  }
  return results;
}

void write_results_table(std::ostream& out, std::span<const EvaluationResult> results) {
  out << "case\tmetric\tmean\tstd\tn\n";
  for (const EvaluationResult& r : results) {
    const std::string_view id = to_string(r.case_id);
    out << id << "\tengagement\t" << (r.engagement_mean ? format_fixed(*r.engagement_mean, 4) : "NA")
        << '\t' << format_fixed(r.engagement_std, 4) << '\t' << r.n_engagement << '\n';
    for (const auto& [name, acc] : r.accuracy_by_feature) {
      out << id << "\taccuracy:" << name << '\t' << (acc.mean ? format_fixed(*acc.mean, 4) : "NA")
          << '\t' << format_fixed(acc.std, 4) << '\t' << acc.n_judged << '\n';
    }
  }
}

nlohmann::json results_to_json(std::span<const EvaluationResult> results) {
  nlohmann::json cases = nlohmann::json::array();
  std::vector<std::string> metrics{"engagement"};
  for (const EvaluationResult& r : results) {
    for (const auto& [name, acc] : r.accuracy_by_feature) {
      const std::string metric = "accuracy:" + name;
      if (std::find(metrics.begin(), metrics.end(), metric) == metrics.end()) metrics.push_back(metric);
    }
  }
  nlohmann::json series = nlohmann::json::array();
  for (const std::string& metric : metrics) {
    nlohmann::json mean = nlohmann::json::array(), std = nlohmann::json::array();
    for (const EvaluationResult& r : results) {
      std::optional<double> m;
      double s = 0.0;
      if (metric == "engagement") {
        m = r.engagement_mean;
        s = r.engagement_std;
      } else if (const auto it = r.accuracy_by_feature.find(metric.substr(9));
                 it != r.accuracy_by_feature.end()) {
        m = it->second.mean;
        s = it->second.std;
      }
      mean.push_back(m ? nlohmann::json(*m) : nlohmann::json(nullptr));
      std.push_back(m ? nlohmann::json(s) : nlohmann::json(nullptr));
    }
    series.push_back({{"metric", metric}, {"mean", mean}, {"std", std}});
  }

  nlohmann::json details = nlohmann::json::array();
  for (const EvaluationResult& r : results) {
    cases.push_back(to_string(r.case_id));
    nlohmann::json accuracy = nlohmann::json::object();
    for (const auto& [name, acc] : r.accuracy_by_feature) {
      accuracy[name] = {{"mean", acc.mean ? nlohmann::json(*acc.mean) : nlohmann::json(nullptr)},
                        {"std", acc.std},
                        {"n_judged", acc.n_judged},
                        {"n_correct", acc.n_correct},
                        {"n_unparseable", acc.n_unparseable},
                        {"n_failed", acc.n_failed}};
    }
    details.push_back(
        {{"case", to_string(r.case_id)},
         {"engagement_mean", r.engagement_mean ? nlohmann::json(*r.engagement_mean) : nlohmann::json(nullptr)},
         {"engagement_std", r.engagement_std},
         {"n_engagement", r.n_engagement},
         {"engagement_unparseable", r.engagement_unparseable},
         {"engagement_failed", r.engagement_failed},
         {"generation_failed", r.generation_failed},
         {"accuracy_by_feature", accuracy},
         {"n_shots", r.n_shots},
         {"n_runs", r.n_runs},
         {"failures", r.failures}});
  }
  return {{"cases", cases}, {"series", series}, {"results", details}};
}

}  // namespace xgw

#include "xgw/app/cli.hpp"

#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "xgw/app/config.hpp"
#include "xgw/app/fetch.hpp"
#include "xgw/app/model_card.hpp"
#include "xgw/app/repository.hpp"
#include "xgw/app/service.hpp"
#include "xgw/error.hpp"
#include "xgw/features.hpp"
#include "xgw/glm.hpp"
#include "xgw/text_format.hpp"

namespace xgw::app {
namespace fs = std::filesystem;

std::vector<CaseId> parse_case_list(const std::string& text) {
  std::vector<CaseId> cases;
  for (std::string_view item : split(text, ',')) {
    item = trim(item);
    if (const auto dots = item.find(".."); dots != std::string_view::npos) {
      const auto lo = parse_case_id(item.substr(0, dots));
      const auto hi = parse_case_id(item.substr(dots + 2));
      if (!lo || !hi || *lo > *hi) throw Error(ErrorCode::kParse, "bad case range", std::string(item));
      for (int k = static_cast<int>(*lo); k <= static_cast<int>(*hi); ++k) {
        cases.push_back(static_cast<CaseId>(k));
      }
    } else {
      const auto id = parse_case_id(item);
      if (!id) throw Error(ErrorCode::kParse, "bad case", std::string(item));
      cases.push_back(*id);
    }
  }
  if (cases.empty()) throw Error(ErrorCode::kParse, "no cases given");
  return cases;
}

namespace {

struct Globals {
  std::string config_path;
  std::string data_root;
  std::string cache_dir;
  std::string asset_dir;
};

AppConfig make_config(const Globals& g) {
  AppConfig c = g.config_path.empty() ? AppConfig{} : load_config(g.config_path);
  apply_environment(c);
  if (!g.data_root.empty()) c.data_root = g.data_root;
  if (!g.cache_dir.empty()) c.cache_dir = g.cache_dir;
  if (!g.asset_dir.empty()) c.asset_dir = g.asset_dir;
  validate(c);
  return c;
}

void print_ingest(std::ostream& out, const std::string& id, const std::vector<ShotEvent>& shots,
                  const AppConfig& c, const fs::path& path) {
  std::size_t framed = 0, penalties = 0;
  for (const ShotEvent& s : shots) {
    framed += s.frame_available ? 1 : 0;
    penalties += s.is_penalty() ? 1 : 0;
  }
  const TrainingSet set = training_set(shots, c.ingest, false);
  out << "competition\t" << id << "\nshots\t" << shots.size() << "\nwith_frame\t" << framed
      << "\npenalties\t" << penalties << "\nmodel_shots\t" << set.rows.size()
      << "\nexcluded_no_keeper\t" << set.excluded << "\nwritten\t" << path.string() << '\n';
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Expected goals models with plain-language explanations", "xgw"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config_path, "key = value configuration file");
  app.add_option("--data-root", g.data_root, "directory of competition data");
  app.add_option("--cache-dir", g.cache_dir, "directory for shots/, models/ and model_cards/");
  app.add_option("--asset-dir", g.asset_dir, "directory of prompt assets and word tables");

  std::string competition;
  auto* ingest = app.add_subcommand("ingest", "parse a competition and write its shots file");
  ingest->add_option("competition", competition)->required();

  FetchRequest fetch_req;
  auto* fetch = app.add_subcommand("fetch", "copy a competition season from an open-data tree");
  fetch->add_option("--source", fetch_req.source, "base url or directory")->required();
  fetch->add_option("--competition", fetch_req.competition)->required();
  fetch->add_option("--season", fetch_req.season)->required();
  fetch->add_option("--as", fetch_req.target_id, "local competition id")->required();

  auto* fit = app.add_subcommand("fit", "fit a competition model and write models/<id>.model");
  fit->add_option("competition", competition)->required();

  std::string shot_id;
  bool as_text = false;
  auto* explain_cmd = app.add_subcommand("explain", "print the contributions of one shot");
  explain_cmd->add_option("shot", shot_id)->required();
  explain_cmd->add_flag("--text", as_text, "print a table instead of JSON");

  std::string case_text = "4";
  bool debug = false;
  auto* word = app.add_subcommand("wordalise", "build the prompt for a case and print the text");
  word->add_option("shot", shot_id)->required();
  word->add_option("--case", case_text, "1-5")->capture_default_str();
  word->add_flag("--debug", debug, "also print the full message list");

  std::string cases_text = "1..5", match, shots_csv, out_dir;
  int runs = 0;
  auto* evaluate = app.add_subcommand("evaluate", "judge cases with the configured model");
  evaluate->add_option("--competition", competition)->required();
  evaluate->add_option("--cases", cases_text)->capture_default_str();
  evaluate->add_option("--runs", runs, "default from config");
  evaluate->add_option("--match", match);
  evaluate->add_option("--shots", shots_csv, "comma separated shot ids");
  evaluate->add_option("--out-dir", out_dir, "export directory (default <cache>/eval)");

  std::vector<std::string> card_ids;
  auto* card = app.add_subcommand("model-card", "write model_cards/model_card.md");
  card->add_option("competitions", card_ids, "default: every competition");

  std::string host = "127.0.0.1";
  int port = 8080;
  auto* serve_cmd = app.add_subcommand("serve", "run the HTTP service");
  serve_cmd->add_option("--host", host)->capture_default_str();
  serve_cmd->add_option("--port", port)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    const AppConfig config = make_config(g);
    Repository repo(config);

    if (*fetch) {
      fetch_req.data_root = config.data_root;
      const FetchReport r = fetch_competition(fetch_req);
      out << "matches\t" << r.matches << "\ndownloaded\t" << r.downloaded << "\ncached\t"
          << r.cached << "\nmissing_frames\t" << r.missing_frames << '\n';
    } else if (*ingest) {
      const auto shots = repo.ingest(competition);
      print_ingest(out, competition, shots, config, repo.shots_path(competition));
    } else if (*fit) {
      const FitOutcome r = repo.fit(competition);
      out << summary_table(r.model);
      for (const std::string& w : r.model.warnings) out << "warning: " << w << '\n';
      const auto data = repo.competition(competition);
      std::vector<DiagnosticFeatures> diag;
      std::vector<FeatureVector> rows;
      for (std::size_t i : data->training_rows) {
        diag.push_back(build_diagnostic_features(data->shots[i]));
        rows.push_back(*data->features[i]);
      }
      for (const CorrelationPair& p : correlation_diagnostics(diag, rows).pairs) {
        out << "pearson(" << p.feature_a << ", " << p.feature_b
            << ") = " << (p.r ? format_fixed(*p.r, 4) : "NA") << '\n';
      }
      out << "written\t" << repo.model_path(competition).string() << '\n';
    } else if (*explain_cmd) {
      const ShotExplanation e = explain(repo.find_shot(shot_id), config.salience_threshold);
      if (as_text) {
        out << "shot\t" << e.shot_id << "\nxg\t" << format_fixed(e.xg, 4) << "\ncategory\t"
            << to_string(e.quality_category) << '\n';
        for (const FeatureContribution& c : e.contributions) {
          out << c.feature_name << '\t' << format_double(c.feature_value) << '\t'
              << format_fixed(c.contribution, 4) << '\t' << to_string(c.direction) << '\n';
        }
      } else {
        out << explanation_to_json(e).dump(2) << '\n';
      }
    } else if (*word) {
      const auto id = parse_case_id(case_text);
      if (!id) throw Error(ErrorCode::kParse, "case must be 1-5", case_text);
      const Resources resources = load_resources(config);
      const Wordalisation w =
          wordalise(repo.find_shot(shot_id), *id, resources, config.salience_threshold);
      if (debug) out << messages_to_json(w.bundle.messages, true).dump(2) << "\n\n";
      out << w.text << '\n';
    } else if (*evaluate) {
      const Resources resources = load_resources(config);
      EvalOptions options;
      options.cases = parse_case_list(cases_text);
      options.n_runs = runs > 0 ? runs : config.eval_runs;
      options.features = config.eval_features;
      options.salience_threshold = config.salience_threshold;
      std::vector<std::string> ids;
      for (std::string_view s : split(shots_csv, ',')) {
        if (!trim(s).empty()) ids.emplace_back(trim(s));
      }
      const auto shots = evaluation_shots(repo, competition,
                                          match.empty() ? std::nullopt : std::optional(match), ids,
                                          resources, config.salience_threshold);
      const auto results = run_evaluation(shots, options, *resources.judge,
                                          resources.generator.get(), resources.assets);
      write_results_table(out, results);
      const fs::path dir = out_dir.empty() ? config.cache_dir / "eval" : fs::path(out_dir);
      fs::create_directories(dir);
      {
        std::ofstream table(dir / (competition + "_results.tsv"));
        write_results_table(table, results);
      }
      {
        std::ofstream chart(dir / (competition + "_results.json"));
        chart << results_to_json(results).dump(2) << '\n';
      }
      for (const EvaluationResult& r : results) {
        if (r.engagement_failed + r.engagement_unparseable + r.generation_failed > 0) {
          err << to_string(r.case_id) << ": " << r.engagement_unparseable
              << " unparseable and " << r.engagement_failed << " failed engagement judgments, "
              << r.generation_failed << " failed generations\n";
        }
      }
    } else if (*card) {
      const Resources resources = load_resources(config);
      if (card_ids.empty()) card_ids = repo.competition_ids();
      std::vector<FittedModel> models;
      std::map<std::string, std::string> names;
      for (const std::string& id : card_ids) {
        const auto data = repo.competition(id);
        models.push_back(data->model);
        names[id] = data->name;
      }
      const fs::path path = config.model_cards_dir() / "model_card.md";
      std::ofstream file(path);
      file << generate_model_card(models, resources.assets, config, names);
      if (!file) throw Error(ErrorCode::kIo, "cannot write " + path.string());
      out << "written\t" << path.string() << '\n';
    } else if (*serve_cmd) {
      Service service(repo, load_resources(config));
      out << "listening on http://" << host << ':' << port << std::endl;
      serve(service, host, port);
    }
  } catch (const Error& e) {
    err << "error [" << error_code_name(e.code()) << "]: " << e.what();
    if (!e.detail().empty()) err << " (" << e.detail() << ')';
    err << '\n';
    return e.code() == ErrorCode::kNotFound ? 3 : 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

}  // namespace xgw::app

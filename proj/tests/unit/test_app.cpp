#include <doctest.h>

#include <fstream>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "support.hpp"
#include "xgw/app/cli.hpp"
#include "xgw/app/config.hpp"
#include "xgw/app/fetch.hpp"
#include "xgw/app/model_card.hpp"
#include "xgw/app/repository.hpp"
#include "xgw/app/service.hpp"
#include "xgw/features.hpp"
#include "xgw/ingest.hpp"
#include "xgw/model_io.hpp"
#include "xgw/shots_table.hpp"

using namespace xgw;
using namespace xgw::app;
using nlohmann::json;

namespace {

AppConfig fixture_config(const std::filesystem::path& cache) {
  AppConfig c;
  c.data_root = test::fixture_data();
  c.cache_dir = cache;
  c.asset_dir = test::asset_dir();
  c.eval_runs = 2;
  validate(c);
  return c;
}

Request get(const std::string& path) { return {"GET", path, {}, {}}; }
Request post(const std::string& path, const json& body) { return {"POST", path, {}, body.dump()}; }

int run(std::vector<std::string> args, std::string* out_text = nullptr, std::string* err_text = nullptr) {
  std::vector<const char*> argv{"xgw"};
  for (const std::string& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int rc = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  if (out_text) *out_text = out.str();
  if (err_text) *err_text = err.str();
  return rc;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("config parsing") {
  std::istringstream in(
      "# comment\n"
      "data_root = d\n"
      "cache_dir = /abs/cache\n"
      "include_penalties = true\n"
      "salience_threshold = 0.2\n"
      "eval.runs = 4\n"
      "eval.features = distance_to_goal, angle_to_gk\n"
      "llm.provider = http\n"
      "llm.endpoint_url = https://example.com/v1/chat/completions\n"
      "llm.model = some-model\n"
      "llm.api_key_env = SOME_KEY\n"
      "llm.temperature = 0.5\n"
      "llm.max_retries = 5\n");
  const AppConfig c = parse_config(in, "/base");
  CHECK(c.data_root == std::filesystem::path("/base/d"));
  CHECK(c.cache_dir == std::filesystem::path("/abs/cache"));
  CHECK(c.ingest.include_penalties);
  CHECK(c.salience_threshold == 0.2);
  CHECK(c.eval_runs == 4);
  CHECK(c.eval_features == std::vector<Feature>{Feature::kDistanceToGoal, Feature::kAngleToGk});
  CHECK(c.llm_provider == "http");
  CHECK(c.llm.model_name == "some-model");
  CHECK(c.llm.api_key_env_var == "SOME_KEY");
  CHECK(c.llm.temperature == 0.5);
  CHECK(c.llm.max_retries == 5);
  CHECK(c.judge_temperature == 0.0);

  for (const char* bad : {"nonsense = 1\n", "salience_threshold = abc\n", "eval.features = nope\n",
                          "no equals sign\n", "include_penalties = maybe\n"}) {
    std::istringstream b(bad);
    CAPTURE(bad);
    CHECK_THROWS_AS(parse_config(b), Error);
  }
  test::TempDir dir("cfg");
  AppConfig neg;
  neg.cache_dir = dir.path();
  neg.salience_threshold = 0.0;
  CHECK_THROWS_AS(validate(neg), Error);
  neg.salience_threshold = 0.1;
  neg.llm_provider = "carrier-pigeon";
  CHECK_THROWS_AS(validate(neg), Error);
}

TEST_CASE("DATA_ROOT overrides the data root") {
  AppConfig c;
  ::setenv("DATA_ROOT", "/tmp/somewhere", 1);
  apply_environment(c);
  ::unsetenv("DATA_ROOT");
  CHECK(c.data_root == std::filesystem::path("/tmp/somewhere"));
}

TEST_CASE("case lists") {
  CHECK(parse_case_list("1..5").size() == 5);
  CHECK(parse_case_list("1,3") == std::vector<CaseId>{CaseId::kCase1, CaseId::kCase3});
  CHECK(parse_case_list("case2") == std::vector<CaseId>{CaseId::kCase2});
  CHECK(parse_case_list("1..2,case5") == std::vector<CaseId>{CaseId::kCase1, CaseId::kCase2, CaseId::kCase5});
  CHECK_THROWS_AS(parse_case_list("0..9"), Error);
  CHECK_THROWS_AS(parse_case_list("x"), Error);
}

TEST_CASE("repository ingests, fits and caches") {
  test::TempDir cache("repo");
  test::WarningCapture quiet;
  Repository repo(fixture_config(cache.path()));
  CHECK(repo.competition_ids() == std::vector<std::string>{"alpha_cup", "beta_league"});
  CHECK(repo.competition_name("alpha_cup") == "Alpha Cup 2030");
  const auto shots = repo.ingest("alpha_cup");
  CHECK(shots.size() == 180);
  CHECK(std::filesystem::exists(repo.shots_path("alpha_cup")));
  const FitOutcome fit = repo.fit("alpha_cup");
  CHECK(fit.model.n_shots == 177);
  CHECK(fit.excluded == 1);
  CHECK(fit.model.converged);
  CHECK(load_model(repo.model_path("alpha_cup")) == fit.model);

  const auto data = repo.competition("alpha_cup");
  CHECK(data->model == fit.model);
  CHECK(data->training_rows.size() == 177);
  CHECK(repo.competition("alpha_cup") == data);
  const auto ref = repo.find_shot(data->shots[10].shot_id);
  CHECK(ref.data->id == "alpha_cup");
  CHECK(ref.index == 10);

  // beta_league is fitted on first use.
  const auto beta = repo.competition("beta_league");
  CHECK(beta->model.n_shots == 177);
  CHECK(std::filesystem::exists(repo.model_path("beta_league")));
  CHECK(repo.competition_of_match("3000005")->id == "beta_league");

  for (const char* bad : {"../etc", "a/b", "", ".."}) {
    CHECK_THROWS_AS(repo.competition(bad), Error);
  }
  try {
    repo.find_shot("no-such-shot");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kNotFound);
  }
}

TEST_CASE("refit is visible to a new repository") {
  test::TempDir cache("refit");
  test::WarningCapture quiet;
  AppConfig config = fixture_config(cache.path());
  {
    Repository repo(config);
    repo.fit("beta_league");
  }
  const std::string first = read_file(cache.path() / "models" / "beta_league.model");
  config.ingest.include_penalties = true;
  Repository repo(config);
  repo.ingest("beta_league");
  const FitOutcome again = repo.fit("beta_league");
  CHECK(again.model.n_shots == 178);
  CHECK(read_file(cache.path() / "models" / "beta_league.model") != first);
  CHECK(repo.competition("beta_league")->model == again.model);
}

TEST_CASE("service endpoints match direct library calls") {
  test::TempDir cache("svc");
  test::WarningCapture quiet;
  const AppConfig config = fixture_config(cache.path());
  Repository repo(config);
  Service service(repo, load_resources(config));

  const Response health = service.handle(get("/health"));
  CHECK(health.status == 200);
  CHECK(json::parse(health.body)["status"] == "ok");

  const json comps = json::parse(service.handle(get("/competitions")).body)["competitions"];
  REQUIRE(comps.size() == 2);
  CHECK(comps[0]["id"] == "alpha_cup");
  CHECK(comps[0]["name"] == "Alpha Cup 2030");

  std::size_t compared = 0, unavailable = 0;
  for (const std::string comp : {"alpha_cup", "beta_league"}) {
    const auto shots = ingest_competition(config.data_root, comp, config.ingest);
    const json model_doc = json::parse(service.handle(get("/competitions/" + comp + "/model")).body);
    const FittedModel model = load_model(cache.path() / "models" / (comp + ".model"));
    CHECK(model_doc["model"] == model_to_json(model));
    for (const ShotEvent& shot : shots) {
      const Response r = service.handle(get("/shots/" + shot.shot_id + "/explanation"));
      FeatureVector x;
      try {
        x = build_feature_vector(shot);
      } catch (const Error& e) {
        CHECK(r.status == 422);
        CHECK(json::parse(r.body)["code"] == std::string(error_code_name(e.code())));
        ++unavailable;
        continue;
      }
      REQUIRE(r.status == 200);
      CHECK(json::parse(r.body) == explanation_to_json(explain_shot(model, x, shot.shot_id)));
      ++compared;
    }
  }
  CHECK(compared >= 350);
  CHECK(unavailable >= 2);

  const json matches = json::parse(service.handle(get("/competitions/alpha_cup/matches")).body)["matches"];
  REQUIRE(matches.size() == 3);
  const std::string match_id = matches[0]["id"];
  const json shots = json::parse(service.handle(get("/matches/" + match_id + "/shots")).body)["shots"];
  CHECK(shots.size() == 60);
  CHECK(shots[0].contains("xg"));
  CHECK(shots[0].contains("explainable"));

  const Response missing = service.handle(get("/shots/nope/explanation"));
  CHECK(missing.status == 404);
  const json envelope = json::parse(missing.body);
  CHECK(envelope["code"] == "not_found");
  CHECK(envelope.contains("message"));
  CHECK(envelope.contains("detail"));
  CHECK(service.handle(get("/nowhere")).status == 404);
  CHECK(service.handle(Request{"DELETE", "/health", {}, {}}).status >= 400);
}

TEST_CASE("wordalise and evaluate endpoints") {
  test::TempDir cache("word");
  test::WarningCapture quiet;
  const AppConfig config = fixture_config(cache.path());
  Repository repo(config);
  Service service(repo, load_resources(config));
  const auto data = repo.competition("beta_league");
  const std::string id = data->shots[data->training_rows[0]].shot_id;

  const Response a = service.handle(post("/shots/" + id + "/wordalise", {{"case", "case4"}}));
  REQUIRE(a.status == 200);
  const Response b = service.handle(post("/shots/" + id + "/wordalise", {{"case", "case4"}}));
  CHECK(a.body == b.body);
  const json doc = json::parse(a.body);
  CHECK_FALSE(doc["text"].get<std::string>().empty());
  CHECK_FALSE(doc.contains("bundle"));

  Request debug = post("/shots/" + id + "/wordalise", {{"case", 3}, {"provider", {{"temperature", 0.2}}}});
  debug.query["debug"] = "1";
  const json d = json::parse(service.handle(debug).body);
  REQUIRE(d.contains("bundle"));
  CHECK(d["bundle"].size() == 2);

  CHECK(service.handle(post("/shots/" + id + "/wordalise", {{"case", "case9"}})).status == 400);
  CHECK(service.handle(Request{"POST", "/shots/" + id + "/wordalise", {}, "{not json"}).status == 400);

  const json eval_body{{"competition", "beta_league"}, {"cases", {1, 5}}, {"runs", 2}, {"match", "3000004"}};
  const Response e1 = service.handle(post("/evaluate", eval_body));
  REQUIRE(e1.status == 200);
  const json results = json::parse(e1.body);
  CHECK(results["results"]["cases"].size() == 2);
  CHECK(results["table"].get<std::string>().rfind("case\tmetric", 0) == 0);
  CHECK(service.handle(post("/evaluate", eval_body)).body == e1.body);
}

TEST_CASE("service over localhost http") {
  test::TempDir cache("http");
  test::WarningCapture quiet;
  const AppConfig config = fixture_config(cache.path());
  Repository repo(config);
  Service service(repo, load_resources(config));
  httplib::Server server;
  service.mount(server);
  const int port = server.bind_to_any_port("127.0.0.1");
  std::thread thread([&] { server.listen_after_bind(); });
  server.wait_until_ready();
  httplib::Client client("127.0.0.1", port);
  const auto health = client.Get("/health");
  REQUIRE(health);
  CHECK(health->status == 200);
  const auto data = repo.competition("alpha_cup");
  const std::string id = data->shots[data->training_rows[3]].shot_id;
  const auto r = client.Get("/shots/" + id + "/explanation");
  REQUIRE(r);
  CHECK(r->status == 200);
  CHECK(json::parse(r->body) == service.shot_explanation(id));
  const auto w = client.Post("/shots/" + id + "/wordalise?debug=1", R"({"case":"case1"})", "application/json");
  REQUIRE(w);
  CHECK(w->status == 200);
  CHECK(json::parse(w->body).contains("bundle"));
  const auto nf = client.Get("/matches/999/shots");
  REQUIRE(nf);
  CHECK(nf->status == 404);
  server.stop();
  thread.join();

  httplib::Server blocker;
  const int taken = blocker.bind_to_any_port("127.0.0.1");
  std::thread blocking([&] { blocker.listen_after_bind(); });
  blocker.wait_until_ready();
  try {
    serve(service, "127.0.0.1", taken);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kIo);
  }
  blocker.stop();
  blocking.join();
}

TEST_CASE("model card") {
  test::TempDir cache("card");
  test::WarningCapture quiet;
  const AppConfig config = fixture_config(cache.path());
  Repository repo(config);
  const Resources resources = load_resources(config);
  const FittedModel alpha = repo.competition("alpha_cup")->model;
  const FittedModel beta = repo.competition("beta_league")->model;
  const std::vector<FittedModel> one{alpha};
  const std::string card = generate_model_card(one, resources.assets, config);
  std::size_t rows = 0;
  std::istringstream lines(card);
  std::string line;
  bool in_table = false;
  while (std::getline(lines, line)) {
    if (line.rfind("| term |", 0) == 0) {
      in_table = true;
      continue;
    }
    if (in_table && line.rfind("|---", 0) == 0) continue;
    if (in_table && line.rfind("| ", 0) == 0) {
      ++rows;
      continue;
    }
    in_table = false;
  }
  CHECK(rows == 12);
  CHECK(card.find("0.1") != std::string::npos);
  CHECK(card.find("0.028") != std::string::npos);
  CHECK(card.find("gk_distance_to_goal") != std::string::npos);

  const std::vector<FittedModel> both{beta, alpha};
  const std::string two = generate_model_card(both, resources.assets, config);
  CHECK(two.find("alpha_cup") < two.find("beta_league"));
  CHECK(generate_model_card(both, resources.assets, config) == two);
  CHECK_THROWS_AS(generate_model_card(std::vector<FittedModel>{}, resources.assets, config), Error);
}

TEST_CASE("cli") {
  test::TempDir cache("cli");
  test::WarningCapture quiet;
  const std::vector<std::string> base{"--data-root", test::fixture_data().string(), "--cache-dir",
                                      cache.path().string(), "--asset-dir", test::asset_dir().string()};
  auto with = [&](std::vector<std::string> args) {
    std::vector<std::string> all = base;
    all.insert(all.end(), args.begin(), args.end());
    return all;
  };
  std::string out, err;
  CHECK(run(with({"ingest", "alpha_cup"}), &out, &err) == 0);
  CHECK(out.find("180") != std::string::npos);
  CHECK(std::filesystem::exists(cache.path() / "shots" / "alpha_cup.tsv"));

  CHECK(run(with({"fit", "alpha_cup"}), &out, &err) == 0);
  CHECK(out.find("intercept") != std::string::npos);
  CHECK(std::filesystem::exists(cache.path() / "models" / "alpha_cup.model"));

  CHECK(run(with({"explain", "no-such-shot"}), &out, &err) != 0);
  CHECK(err.find("shot not found") != std::string::npos);

  const auto shots = load_shots_table(cache.path() / "shots" / "alpha_cup.tsv");
  const std::string id = shots[0].shot_id;
  CHECK(run(with({"explain", id}), &out, &err) == 0);
  CHECK(json::parse(out)["shot_id"] == id);
  CHECK(run(with({"wordalise", id, "--case", "4"}), &out, &err) == 0);
  CHECK_FALSE(out.empty());

  std::string first, second;
  CHECK(run(with({"evaluate", "--competition", "alpha_cup", "--runs", "2", "--match", "3000002"}), &first, &err) == 0);
  CHECK(run(with({"evaluate", "--competition", "alpha_cup", "--runs", "2", "--match", "3000002"}), &second, &err) == 0);
  CHECK(first == second);
  CHECK(first.find("case\tmetric\tmean\tstd\tn") != std::string::npos);
  CHECK(std::filesystem::exists(cache.path() / "eval" / "alpha_cup_results.tsv"));
  CHECK(std::filesystem::exists(cache.path() / "eval" / "alpha_cup_results.json"));

  CHECK(run(with({"model-card"}), &out, &err) == 0);
  CHECK(std::filesystem::exists(cache.path() / "model_cards" / "model_card.md"));

  CHECK(run(with({"frobnicate"}), &out, &err) != 0);
  CHECK(run(with({"wordalise", id, "--bogus"}), &out, &err) != 0);
}

TEST_CASE("fetch from a local open-data tree") {
  test::TempDir root("fetch");
  FetchRequest req;
  req.source = (test::fixture_dir() / "open_data").string();
  req.competition = "77";
  req.season = "9";
  req.target_id = "fetched";
  req.data_root = root.path();
  const FetchReport first = fetch_competition(req);
  CHECK(first.matches == 3);
  CHECK(first.downloaded > 0);
  CHECK(first.missing_frames == 1);
  const FetchReport again = fetch_competition(req);
  CHECK(again.downloaded == 0);
  CHECK(again.cached > 0);
  test::WarningCapture quiet;
  const auto fetched = ingest_competition(root.path(), "fetched", IngestConfig{});
  const auto original = ingest_competition(test::fixture_data(), "beta_league", IngestConfig{});
  CHECK(fetched.size() == original.size());
  req.competition = "404";
  CHECK_THROWS_AS(fetch_competition(req), Error);
}

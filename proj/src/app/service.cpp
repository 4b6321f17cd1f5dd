#include "xgw/app/service.hpp"

#include <sstream>

#include <httplib.h>

#include "xgw/error.hpp"
#include "xgw/model_io.hpp"
#include "xgw/simd/kernels.hpp"
#include "xgw/text_format.hpp"

namespace xgw::app {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::shared_ptr<ChatProvider> make_generation_provider(const AppConfig& c) {
  if (c.llm_provider == "http") return std::make_shared<HttpChatProvider>();
  auto mock = c.mock_script.empty() ? std::make_shared<MockProvider>()
                                    : std::make_shared<MockProvider>(load_mock_script(c.mock_script));
  mock->set_fallback_responder([](const std::vector<ChatMessage>& messages) -> std::optional<std::string> {
    for (auto it = messages.rbegin(); it != messages.rend(); ++it) {
      if (it->stage == MessageStage::kData) return it->content;
    }
    return std::nullopt;
  });
  return mock;
}

std::shared_ptr<ChatProvider> make_judge_provider(const AppConfig& c) {
  if (c.llm_provider == "http") return std::make_shared<HttpChatProvider>();
  MockScript script = c.mock_script.empty() ? MockScript{} : load_mock_script(c.mock_script);
  if (!script.fallback) script.fallback = c.mock_fallback;
  return std::make_shared<MockProvider>(script);
}

std::vector<std::string> path_parts(const std::string& path) {
  std::vector<std::string> parts;
  for (std::string_view p : split(path, '/')) {
    if (!p.empty()) parts.emplace_back(p);
  }
  return parts;
}

json parse_body(const std::string& body) {
  if (trim(body).empty()) return json::object();
  json doc = json::parse(body, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) {
    throw Error(ErrorCode::kParse, "request body must be a JSON object");
  }
  return doc;
}

CaseId case_from_json(const json& value) {
  std::optional<CaseId> id;
  if (value.is_number_integer()) id = parse_case_id(std::to_string(value.get<long long>()));
  if (value.is_string()) id = parse_case_id(value.get<std::string>());
  if (!id) throw Error(ErrorCode::kParse, "case must be 1-5 or case1-case5", value.dump());
  return *id;
}

json synth_to_json(const SynthesizedText& s) {
  return {{"quality_section", s.quality_section},
          {"features_section", s.features_section},
          {"contributions_section", s.contributions_section}};
}

}  // namespace

Resources load_resources(const AppConfig& config) {
  const fs::path dir = config.resolved_asset_dir();
  Resources r;
  r.assets = load_prompt_assets(PromptAssetPaths::in_directory(dir));
  r.words = WordTable::load(dir / "word_tables.tsv");
  LlmConfig judge = config.llm;
  judge.temperature = config.judge_temperature;
  r.generator = std::make_shared<Gateway>(make_generation_provider(config), config.llm);
  r.judge = std::make_shared<Gateway>(make_judge_provider(config), judge);
  return r;
}

ShotExplanation explain(const Repository::ShotRef& ref, double threshold) {
  const auto& features = ref.data->features.at(ref.index);
  if (!features) {
    throw Error(ErrorCode::kFeatureUnavailable,
                "shot has no freeze frame with a visible goalkeeper", ref.shot().shot_id);
  }
  return explain_shot(ref.data->model, *features, ref.shot().shot_id, threshold);
}

Wordalisation wordalise(const Repository::ShotRef& ref, CaseId case_id, const Resources& resources,
                        double threshold, const Gateway* generator_override) {
  Wordalisation w;
  w.explanation = explain(ref, threshold);
  const FeatureVector& x = *ref.data->features.at(ref.index);
  w.synth = synthesize(w.explanation, ref.shot(), ref.data->bands, resources.words);
  w.bundle = assemble_prompt(case_id, w.synth, x, resources.assets);
  if (requires_generation(case_id)) {
    const Gateway& gateway = generator_override ? *generator_override : *resources.generator;
    w.chat = gateway.chat(w.bundle);
    w.text = w.chat->text;
  } else {
    w.text = case_data_text(case_id, w.synth, x);
  }
  return w;
}

std::vector<EvalShot> evaluation_shots(Repository& repo, const std::string& competition_id,
                                       const std::optional<std::string>& match_id,
                                       const std::vector<std::string>& shot_ids,
                                       const Resources& resources, double threshold) {
  const auto data = repo.competition(competition_id);
  std::vector<std::size_t> rows;
  if (!shot_ids.empty()) {
    for (const std::string& id : shot_ids) {
      const auto it = data->shot_index.find(id);
      if (it == data->shot_index.end()) {
        throw Error(ErrorCode::kNotFound, "shot not found in competition " + competition_id, id);
      }
      rows.push_back(it->second);
    }
  } else {
    for (std::size_t i : data->training_rows) {
      if (!match_id || data->shots[i].match_id == *match_id) rows.push_back(i);
    }
  }
  std::vector<EvalShot> out;
  for (std::size_t i : rows) {
    const Repository::ShotRef ref{data, i};
    EvalShot e;
    e.explanation = explain(ref, threshold);
    e.x = *data->features[i];
    e.synth = synthesize(e.explanation, ref.shot(), data->bands, resources.words);
    out.push_back(std::move(e));
  }
  return out;
}

json shot_to_json(const ShotEvent& s) {
  json frame = json::array();
  for (const FramePlayer& p : s.freeze_frame) {
    frame.push_back({{"x", p.location.x},
                     {"y", p.location.y},
                     {"teammate", p.is_teammate},
                     {"keeper", p.is_keeper}});
  }
  return {{"shot_id", s.shot_id},
          {"match_id", s.match_id},
          {"competition_id", s.competition_id},
          {"minute", s.minute},
          {"second", s.second},
          {"player", s.player_name},
          {"team", s.team_name},
          {"goal", s.outcome_is_goal},
          {"body_part", to_string(s.body_part)},
          {"play_pattern", to_string(s.play_pattern)},
          {"location", {{"x", s.location.x}, {"y", s.location.y}}},
          {"frame_available", s.frame_available},
          {"freeze_frame", frame}};
}

json error_envelope(const Error& e) {
  return {{"code", error_code_name(e.code())}, {"message", e.what()}, {"detail", e.detail()}};
}

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNotFound: return 404;
    case ErrorCode::kParse:
    case ErrorCode::kContractViolation:
    case ErrorCode::kSchemaMismatch: return 400;
    case ErrorCode::kFeatureUnavailable:
    case ErrorCode::kDegenerateGeometry: return 422;
    case ErrorCode::kGateway: return 502;
    default: return 500;
  }
}

Service::Service(Repository& repo, Resources resources)
    : repo_(repo), resources_(std::move(resources)) {}

json Service::health() const {
  return {{"status", "ok"},
          {"simd", std::string(simd::to_string(simd::active_level()))},
          {"llm_provider", resources_.generator->provider().name()}};
}

json Service::competitions() {
  json list = json::array();
  for (const std::string& id : repo_.competition_ids()) {
    list.push_back({{"id", id}, {"name", repo_.competition_name(id)}});
  }
  return {{"competitions", list}};
}

json Service::competition_model(const std::string& id) {
  const auto data = repo_.competition(id);
  return {{"competition_id", id},
          {"name", data->name},
          {"model", model_to_json(data->model)},
          {"bands", bands_to_json(data->bands)},
          {"summary", summary_table(data->model)}};
}

json Service::competition_matches(const std::string& id) {
  json list = json::array();
  for (const MatchInfo& m : repo_.matches(id)) {
    list.push_back({{"id", m.match_id}, {"label", m.label}});
  }
  return {{"competition_id", id}, {"matches", list}};
}

json Service::match_shots(const std::string& match_id) {
  const auto data = repo_.competition_of_match(match_id);
  json list = json::array();
  for (std::size_t i = 0; i < data->shots.size(); ++i) {
    const ShotEvent& s = data->shots[i];
    if (s.match_id != match_id) continue;
    json doc = shot_to_json(s);
    doc["explainable"] = data->features[i].has_value();
    if (data->features[i]) doc["xg"] = predict_xg(data->model, *data->features[i]);
    list.push_back(std::move(doc));
  }
  return {{"match_id", match_id}, {"competition_id", data->id}, {"shots", list}};
}

json Service::shot_explanation(const std::string& shot_id) {
  return explanation_to_json(explain(repo_.find_shot(shot_id), repo_.config().salience_threshold));
}

json Service::shot_wordalise(const std::string& shot_id, const json& body, bool debug) {
  const CaseId case_id = body.contains("case") ? case_from_json(body["case"]) : CaseId::kCase4;
  std::optional<Gateway> override_gateway;
  if (body.contains("provider")) {
    const json& p = body["provider"];
    if (!p.is_object()) throw Error(ErrorCode::kParse, "provider overrides must be an object");
    LlmConfig c = resources_.generator->config();
    for (const auto& [key, value] : p.items()) {
      if (key == "temperature" && value.is_number()) c.temperature = value.get<double>();
      else if (key == "model" && value.is_string()) c.model_name = value.get<std::string>();
      else if (key == "max_retries" && value.is_number_integer()) c.max_retries = value.get<int>();
      else throw Error(ErrorCode::kParse, "unsupported provider override", key);
    }
    override_gateway.emplace(resources_.generator->with_config(c));
  }
  const auto ref = repo_.find_shot(shot_id);
  const Wordalisation w = wordalise(ref, case_id, resources_, repo_.config().salience_threshold,
                                    override_gateway ? &*override_gateway : nullptr);
  json doc = {{"shot_id", shot_id},
              {"case", to_string(case_id)},
              {"text", w.text},
              {"synthesized", synth_to_json(w.synth)},
              {"attempts", w.chat ? w.chat->attempts : 0}};
  if (w.chat) doc["provider_meta"] = w.chat->provider_meta;
  if (debug) doc["bundle"] = messages_to_json(w.bundle.messages, true);
  return doc;
}

json Service::evaluate(const json& body) {
  if (!body.contains("competition") || !body["competition"].is_string()) {
    throw Error(ErrorCode::kParse, "evaluate needs a competition id");
  }
  EvalOptions options;
  options.n_runs = body.value("runs", repo_.config().eval_runs);
  options.features = repo_.config().eval_features;
  options.salience_threshold = repo_.config().salience_threshold;
  if (body.contains("cases")) {
    options.cases.clear();
    for (const json& c : body["cases"]) options.cases.push_back(case_from_json(c));
  }
  if (body.contains("features")) {
    options.features.clear();
    for (const json& f : body["features"]) {
      const auto feature = f.is_string() ? find_feature(f.get<std::string>()) : std::nullopt;
      if (!feature) throw Error(ErrorCode::kParse, "unknown feature", f.dump());
      options.features.push_back(*feature);
    }
  }
  std::optional<std::string> match;
  if (body.contains("match")) match = body["match"].get<std::string>();
  std::vector<std::string> ids;
  if (body.contains("shots")) ids = body["shots"].get<std::vector<std::string>>();

  const auto shots = evaluation_shots(repo_, body["competition"].get<std::string>(), match, ids,
                                      resources_, options.salience_threshold);
  const auto results =
      run_evaluation(shots, options, *resources_.judge, resources_.generator.get(), resources_.assets);
  std::ostringstream table;
  write_results_table(table, results);
  return {{"results", results_to_json(results)}, {"table", table.str()}};
}

Response Service::handle(const Request& req) {
  Response res;
  try {
    const auto parts = path_parts(req.path);
    const auto n = parts.size();
    json doc;
    bool routed = true;
    if (req.method == "GET") {
      if (n == 1 && parts[0] == "health") doc = health();
      else if (n == 1 && parts[0] == "competitions") doc = competitions();
      else if (n == 3 && parts[0] == "competitions" && parts[2] == "model") doc = competition_model(parts[1]);
      else if (n == 3 && parts[0] == "competitions" && parts[2] == "matches") doc = competition_matches(parts[1]);
      else if (n == 3 && parts[0] == "matches" && parts[2] == "shots") doc = match_shots(parts[1]);
      else if (n == 3 && parts[0] == "shots" && parts[2] == "explanation") doc = shot_explanation(parts[1]);
      else routed = false;
    } else if (req.method == "POST") {
      if (n == 3 && parts[0] == "shots" && parts[2] == "wordalise") {
        const auto debug = req.query.find("debug");
        doc = shot_wordalise(parts[1], parse_body(req.body),
                             debug != req.query.end() && (debug->second == "1" || debug->second == "true"));
      } else if (n == 1 && parts[0] == "evaluate") {
        doc = evaluate(parse_body(req.body));
      } else {
        routed = false;
      }
    } else {
      routed = false;
    }
    if (!routed) throw Error(ErrorCode::kNotFound, "no such endpoint", req.method + " " + req.path);
    res.body = doc.dump();
  } catch (const Error& e) {
    res.status = http_status(e.code());
    res.body = error_envelope(e).dump();
  } catch (const json::exception& e) {
    res.status = 400;
    res.body = json{{"code", "parse"}, {"message", "malformed request"}, {"detail", e.what()}}.dump();
  } catch (const std::exception& e) {
    res.status = 500;
    res.body = json{{"code", "internal"}, {"message", "internal error"}, {"detail", e.what()}}.dump();
  }
  return res;
}

void Service::mount(httplib::Server& server) {
  const auto adapter = [this](const httplib::Request& in, httplib::Response& out) {
    Request req{in.method, in.path, {}, in.body};
    for (const auto& [k, v] : in.params) req.query.emplace(k, v);
    const Response r = handle(req);
    out.status = r.status;
    out.set_content(r.body, r.content_type);
  };
  server.Get(".*", adapter);
  server.Post(".*", adapter);
}

void serve(Service& service, const std::string& host, int port) {
  httplib::Server server;
  service.mount(server);
  // Address reuse only; port sharing would let a second instance bind a busy port.
  server.set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
  });
  if (!server.bind_to_port(host, port)) {
    throw Error(ErrorCode::kIo, "cannot bind " + host + ":" + std::to_string(port));
  }
  server.listen_after_bind();
}

}  // namespace xgw::app

#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "xgw/app/repository.hpp"
#include "xgw/error.hpp"
#include "xgw/eval.hpp"
#include "xgw/explain.hpp"
#include "xgw/llm.hpp"
#include "xgw/prompt_assets.hpp"
#include "xgw/textgen.hpp"

namespace httplib {
class Server;
}

namespace xgw::app {

// Assets and language-model access shared by the CLI and the HTTP service.
struct Resources {
  PromptAssets assets;
  WordTable words;
  std::shared_ptr<Gateway> generator;
  std::shared_ptr<Gateway> judge;
};

// With the mock provider, generation replies that are not scripted echo the
// data message; judge replies fall back to llm.mock_fallback.
Resources load_resources(const AppConfig& config);

ShotExplanation explain(const Repository::ShotRef& ref, double salience_threshold);

struct Wordalisation {
  ShotExplanation explanation;
  SynthesizedText synth;
  PromptBundle bundle;
  std::string text;
  std::optional<ChatResult> chat;  // set for cases that call the model
};

Wordalisation wordalise(const Repository::ShotRef& ref, CaseId case_id, const Resources& resources,
                        double salience_threshold, const Gateway* generator_override = nullptr);

// Explainable training shots of a competition, optionally restricted to one
// match or to explicit shot ids (which must exist and be explainable).
std::vector<EvalShot> evaluation_shots(Repository& repo, const std::string& competition_id,
                                       const std::optional<std::string>& match_id,
                                       const std::vector<std::string>& shot_ids,
                                       const Resources& resources, double salience_threshold);

nlohmann::json shot_to_json(const ShotEvent& shot);
nlohmann::json error_envelope(const Error& error);
int http_status(ErrorCode code);

struct Request {
  std::string method;
  std::string path;
  std::map<std::string, std::string> query;
  std::string body;
};

struct Response {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
};

class Service {
 public:
  Service(Repository& repo, Resources resources);

  // Routes a request; errors become {code, message, detail} envelopes.
  Response handle(const Request& request);

  nlohmann::json health() const;
  nlohmann::json competitions();
  nlohmann::json competition_model(const std::string& competition_id);
  nlohmann::json competition_matches(const std::string& competition_id);
  nlohmann::json match_shots(const std::string& match_id);
  nlohmann::json shot_explanation(const std::string& shot_id);
  nlohmann::json shot_wordalise(const std::string& shot_id, const nlohmann::json& body, bool debug);
  nlohmann::json evaluate(const nlohmann::json& body);

  void mount(httplib::Server& server);

 private:
  Repository& repo_;
  Resources resources_;
};

// Blocks until the server stops. Throws kIo when the port cannot be bound.
void serve(Service& service, const std::string& host, int port);

}  // namespace xgw::app

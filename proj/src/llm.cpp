#include "xgw/llm.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <regex>
#include <thread>

#include <httplib.h>

#include "xgw/error.hpp"
#include "xgw/text_format.hpp"

namespace xgw {

void validate(const LlmConfig& c) {
  if (c.max_retries < 0) throw Error(ErrorCode::kConfiguration, "llm max_retries must be >= 0");
  if (!(c.timeout_seconds > 0.0)) {
    throw Error(ErrorCode::kConfiguration, "llm timeout must be positive");
  }
  if (!(c.temperature >= 0.0)) {
    throw Error(ErrorCode::kConfiguration, "llm temperature must be >= 0");
  }
  if (!(c.requests_per_minute >= 0.0)) {
    throw Error(ErrorCode::kConfiguration, "llm requests_per_minute must be >= 0");
  }
  if (!(c.backoff_base_seconds >= 0.0) || !(c.backoff_factor >= 1.0) ||
      !(c.backoff_jitter >= 0.0 && c.backoff_jitter < 1.0)) {
    throw Error(ErrorCode::kConfiguration, "llm backoff settings out of range");
  }
}

nlohmann::json chat_request_body(const std::vector<ChatMessage>& messages,
                                 const std::string& model, double temperature) {
  return {{"model", model},
          {"messages", messages_to_json(messages)},
          {"temperature", temperature}};
}

std::string parse_chat_response(std::string_view body) {
  const auto doc = nlohmann::json::parse(body, nullptr, false);
  if (doc.is_discarded()) throw Error(ErrorCode::kGateway, "response is not valid JSON");
  const auto choices = doc.find("choices");
  if (choices == doc.end() || !choices->is_array() || choices->empty()) {
    throw Error(ErrorCode::kGateway, "response has no choices");
  }
  const auto& first = (*choices)[0];
  if (!first.contains("message") || !first["message"].contains("content") ||
      !first["message"]["content"].is_string()) {
    throw Error(ErrorCode::kGateway, "response choice has no message content");
  }
  return first["message"]["content"].get<std::string>();
}

EndpointUrl parse_endpoint_url(std::string_view url) {
  static const std::regex pattern(R"(^(https?)://([A-Za-z0-9.\-]+|\[[0-9A-Fa-f:]+\])(?::([0-9]{1,5}))?(/[^\s]*)?$)");
  std::cmatch m;
  if (!std::regex_match(url.data(), url.data() + url.size(), m, pattern)) {
    throw Error(ErrorCode::kConfiguration, "malformed llm endpoint url", std::string(url));
  }
  EndpointUrl out;
  out.scheme = m[1].str();
  out.host = m[2].str();
  out.port = out.scheme == "https" ? 443 : 80;
  if (m[3].matched) {
    out.port = static_cast<int>(*parse_int(m[3].str()));
    if (out.port < 1 || out.port > 65535) {
      throw Error(ErrorCode::kConfiguration, "llm endpoint port out of range", std::string(url));
    }
  }
  out.path = m[4].matched ? m[4].str() : "/";
  return out;
}

namespace {

std::string api_key(const LlmConfig& config) {
  if (config.api_key_env_var.empty()) return {};
  const char* value = std::getenv(config.api_key_env_var.c_str());
  if (value == nullptr || *value == '\0') {
    throw Error(ErrorCode::kConfiguration,
                "environment variable " + config.api_key_env_var + " holding the api key is not set");
  }
  return value;
}

}  // namespace

void HttpChatProvider::prepare(const LlmConfig& config) const {
  const EndpointUrl url = parse_endpoint_url(config.endpoint_url);
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
  if (url.scheme == "https") {
    throw Error(ErrorCode::kConfiguration, "built without TLS support; https endpoints unavailable");
  }
#else
  (void)url;
#endif
  if (config.model_name.empty()) throw Error(ErrorCode::kConfiguration, "llm model name is empty");
  (void)api_key(config);
}

AttemptOutcome HttpChatProvider::send(const std::vector<ChatMessage>& messages,
                                      const LlmConfig& config, double temperature) {
  const EndpointUrl url = parse_endpoint_url(config.endpoint_url);
  const std::string key = api_key(config);
  httplib::Client client(url.scheme + "://" + url.host + ":" + std::to_string(url.port));
  const auto whole = static_cast<time_t>(config.timeout_seconds);
  const auto micros = static_cast<time_t>((config.timeout_seconds - static_cast<double>(whole)) * 1e6);
  client.set_connection_timeout(whole, micros);
  client.set_read_timeout(whole, micros);
  client.set_write_timeout(whole, micros);

  httplib::Headers headers;
  if (!key.empty()) headers.emplace("Authorization", "Bearer " + key);
  const std::string body = chat_request_body(messages, config.model_name, temperature).dump();

  AttemptOutcome out;
  out.meta = {{"provider", "http"}, {"model", config.model_name}, {"host", url.host}};
  const auto res = client.Post(url.path, headers, body, "application/json");
  if (!res) {
    out.retryable = true;
    out.error = "transport error: " + httplib::to_string(res.error());
    return out;
  }
  out.status = res->status;
  out.meta["status"] = res->status;
  if (res->status == 429 || res->status >= 500) {
    out.retryable = true;
    out.error = "http status " + std::to_string(res->status);
    return out;
  }
  if (res->status < 200 || res->status >= 300) {
    out.error = "http status " + std::to_string(res->status);
    return out;
  }
  try {
    out.text = parse_chat_response(res->body);
  } catch (const Error& e) {
    out.error = e.what();
    return out;
  }
  const auto doc = nlohmann::json::parse(res->body, nullptr, false);
  if (doc.is_object() && doc.contains("usage")) out.meta["usage"] = doc["usage"];
  out.ok = true;
  return out;
}

MockScript parse_mock_script(std::istream& in) {
  MockScript script;
  std::string line;
  std::size_t row = 0;
  bool header = true;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    if (header) {
      header = false;
      continue;
    }
    const std::size_t tab = line.find('\t');
    if (tab == std::string::npos || line.find('\t', tab + 1) != std::string::npos) {
      throw Error(ErrorCode::kParse, "mock script row " + std::to_string(row) +
                                         ": expected fingerprint<TAB>reply");
    }
    const std::string key = line.substr(0, tab);
    std::string reply = unescape_field(std::string_view(line).substr(tab + 1));
    if (key == "*") {
      script.fallback = std::move(reply);
    } else {
      script.replies[key] = std::move(reply);
    }
  }
  return script;
}

MockScript load_mock_script(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kConfiguration, "cannot open mock script " + path.string());
  return parse_mock_script(in);
}

void write_mock_script(std::ostream& out, const MockScript& script) {
  out << "fingerprint\treply\n";
  if (script.fallback) out << "*\t" << escape_field(*script.fallback) << '\n';
  for (const auto& [key, reply] : script.replies) out << key << '\t' << escape_field(reply) << '\n';
}

MockProvider::MockProvider(std::map<std::string, std::string> script, std::string fallback)
    : script_(std::move(script)), fallback_(std::move(fallback)) {}

MockProvider::MockProvider(const MockScript& script)
    : script_(script.replies),
      fallback_(script.fallback.value_or(std::string(kDefaultFallback))) {}

void MockProvider::set_reply(const std::string& fp, std::string reply) {
  std::lock_guard lock(mutex_);
  script_[fp] = std::move(reply);
}

void MockProvider::set_fallback(std::string reply) {
  std::lock_guard lock(mutex_);
  fallback_ = std::move(reply);
}

void MockProvider::set_responder(Responder responder) {
  std::lock_guard lock(mutex_);
  responder_ = std::move(responder);
}

void MockProvider::set_fallback_responder(Responder responder) {
  std::lock_guard lock(mutex_);
  fallback_responder_ = std::move(responder);
}

void MockProvider::fail_next(int k) {
  std::lock_guard lock(mutex_);
  failures_left_ = k;
}

int MockProvider::calls() const {
  std::lock_guard lock(mutex_);
  return calls_;
}

std::size_t MockProvider::script_size() const {
  std::lock_guard lock(mutex_);
  return script_.size();
}

AttemptOutcome MockProvider::send(const std::vector<ChatMessage>& messages, const LlmConfig&,
                                  double) {
  Responder responder;
  Responder fallback_responder;
  AttemptOutcome out;
  const std::string fp = fingerprint(messages);
  out.meta = {{"provider", "mock"}, {"fingerprint", fp}};
  std::optional<std::string> scripted;
  std::string fallback;
  {
    std::lock_guard lock(mutex_);
    ++calls_;
    if (failures_left_ > 0) {
      --failures_left_;
      out.retryable = true;
      out.error = "scripted transient failure";
      return out;
    }
    responder = responder_;
    fallback_responder = fallback_responder_;
    if (const auto it = script_.find(fp); it != script_.end()) scripted = it->second;
    fallback = fallback_;
  }
  out.ok = true;
  if (responder) {
    if (auto reply = responder(messages)) {
      out.text = std::move(*reply);
      out.meta["source"] = "responder";
      return out;
    }
  }
  if (scripted) {
    out.text = std::move(*scripted);
    out.meta["source"] = "script";
    return out;
  }
  if (fallback_responder) {
    if (auto reply = fallback_responder(messages)) {
      out.text = std::move(*reply);
      out.meta["source"] = "fallback_responder";
      return out;
    }
  }
  out.text = std::move(fallback);
  out.meta["source"] = "fallback";
  return out;
}

void real_sleep(std::chrono::duration<double> delay) {
  if (delay.count() > 0.0) std::this_thread::sleep_for(delay);
}

std::vector<double> backoff_schedule(const LlmConfig& config, int retries, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::vector<double> delays;
  double nominal = config.backoff_base_seconds;
  for (int k = 0; k < retries; ++k) {
    double d = nominal * (1.0 + config.backoff_jitter * unit(rng));
    if (!delays.empty()) d = std::max(d, delays.back());
    delays.push_back(d);
    nominal *= config.backoff_factor;
  }
  return delays;
}

RateLimiter::RateLimiter(double requests_per_minute, Sleeper sleeper)
    : interval_(requests_per_minute > 0.0 ? 60.0 / requests_per_minute : 0.0),
      sleeper_(std::move(sleeper)) {}

void RateLimiter::acquire() {
  if (interval_ <= 0.0) return;
  Clock::duration wait{};
  {
    std::lock_guard lock(mutex_);
    const auto now = Clock::now();
    const auto slot = std::max(now, next_);
    next_ = slot + std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(interval_));
    wait = slot - now;
  }
  if (wait > Clock::duration::zero()) sleeper_(wait);
}

Gateway::Gateway(std::shared_ptr<ChatProvider> provider, LlmConfig config, Sleeper sleeper)
    : provider_(std::move(provider)), config_(std::move(config)), sleeper_(std::move(sleeper)) {
  if (!provider_) throw Error(ErrorCode::kConfiguration, "gateway needs a provider");
  validate(config_);
  limiter_ = std::make_shared<RateLimiter>(config_.requests_per_minute, sleeper_);
}

Gateway::Gateway(std::shared_ptr<ChatProvider> provider, LlmConfig config, Sleeper sleeper,
                 std::shared_ptr<RateLimiter> limiter)
    : provider_(std::move(provider)),
      config_(std::move(config)),
      sleeper_(std::move(sleeper)),
      limiter_(std::move(limiter)) {
  if (!provider_ || !limiter_) throw Error(ErrorCode::kConfiguration, "gateway needs a provider");
  validate(config_);
}

Gateway Gateway::with_config(LlmConfig config) const {
  return Gateway(provider_, std::move(config), sleeper_, limiter_);
}

ChatResult Gateway::chat(const PromptBundle& bundle) const {
  return chat(bundle.messages, config_.temperature);
}

ChatResult Gateway::chat(const std::vector<ChatMessage>& messages, double temperature) const {
  provider_->prepare(config_);
  const std::string fp = fingerprint(messages);
  const auto delays =
      backoff_schedule(config_, config_.max_retries, config_.jitter_seed ^ std::stoull(fp, nullptr, 16));

  nlohmann::json errors = nlohmann::json::array();
  std::string last;
  int attempts = 0;
  for (int k = 0; k <= config_.max_retries; ++k) {
    limiter_->acquire();
    AttemptOutcome outcome = provider_->send(messages, config_, temperature);
    ++attempts;
    if (outcome.ok) {
      ChatResult result;
      result.text = std::move(outcome.text);
      result.attempts = attempts;
      result.provider_meta = std::move(outcome.meta);
      result.provider_meta["attempts"] = attempts;
      result.provider_meta["errors"] = errors;
      return result;
    }
    last = outcome.error;
    errors.push_back(outcome.error);
    if (!outcome.retryable || k == config_.max_retries) break;
    sleeper_(std::chrono::duration<double>(delays[static_cast<std::size_t>(k)]));
  }
  throw Error(ErrorCode::kGateway,
              provider_->name() + " request failed after " + std::to_string(attempts) +
                  (attempts == 1 ? " attempt" : " attempts"),
              last);
}

}  // namespace xgw

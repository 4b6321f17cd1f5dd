#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "xgw/chat.hpp"

namespace xgw {

inline constexpr double kGenerationTemperature = 0.7;
inline constexpr double kJudgeTemperature = 0.0;

struct LlmConfig {
  std::string endpoint_url;      // e.g. https://host/v1/chat/completions
  std::string model_name;
  std::string api_key_env_var;   // empty: send no Authorization header
  double temperature = kGenerationTemperature;
  int max_retries = 3;
  double timeout_seconds = 60.0;
  double requests_per_minute = 0.0;  // 0 disables the limiter
  double backoff_base_seconds = 1.0;
  double backoff_factor = 2.0;
  double backoff_jitter = 0.2;
  std::uint64_t jitter_seed = 0x5eed;
};

// Throws kConfiguration for negative retries, non-positive timeout, negative
// temperature or rate.
void validate(const LlmConfig& config);

struct ChatResult {
  std::string text;
  nlohmann::json provider_meta;  // never contains credentials
  int attempts = 0;
};

// Outcome of one request to a provider.
struct AttemptOutcome {
  bool ok = false;
  bool retryable = false;
  std::string text;
  std::string error;
  int status = 0;  // HTTP status when there was one
  nlohmann::json meta = nlohmann::json::object();
};

class ChatProvider {
 public:
  virtual ~ChatProvider() = default;
  virtual std::string name() const = 0;
  // Checks that must pass before any attempt; throws kConfiguration.
  virtual void prepare(const LlmConfig& config) const { (void)config; }
  virtual AttemptOutcome send(const std::vector<ChatMessage>& messages, const LlmConfig& config,
                              double temperature) = 0;
};

// {"model", "messages", "temperature"}
nlohmann::json chat_request_body(const std::vector<ChatMessage>& messages,
                                 const std::string& model, double temperature);
// choices[0].message.content; throws kGateway when absent.
std::string parse_chat_response(std::string_view body);

struct EndpointUrl {
  std::string scheme;
  std::string host;
  int port = 0;
  std::string path;
};
// http or https only; throws kConfiguration otherwise.
EndpointUrl parse_endpoint_url(std::string_view url);

class HttpChatProvider : public ChatProvider {
 public:
  std::string name() const override { return "http"; }
  void prepare(const LlmConfig& config) const override;
  AttemptOutcome send(const std::vector<ChatMessage>& messages, const LlmConfig& config,
                      double temperature) override;
};

// Tab-separated "fingerprint<TAB>reply" rows after a header; a "*" row sets
// the fallback. Replies use backslash escapes.
struct MockScript {
  std::map<std::string, std::string> replies;
  std::optional<std::string> fallback;
};
MockScript parse_mock_script(std::istream& in);
MockScript load_mock_script(const std::filesystem::path& path);
void write_mock_script(std::ostream& out, const MockScript& script);

// Replies by fingerprint of the message list. Thread-safe.
class MockProvider : public ChatProvider {
 public:
  static constexpr std::string_view kDefaultFallback = "not contributing";
  using Responder = std::function<std::optional<std::string>(const std::vector<ChatMessage>&)>;

  explicit MockProvider(std::map<std::string, std::string> script = {},
                        std::string fallback = std::string(kDefaultFallback));

  explicit MockProvider(const MockScript& script);

  void set_reply(const std::string& fingerprint, std::string reply);
  void set_fallback(std::string reply);
  // Consulted before the script; returning nullopt defers to it.
  void set_responder(Responder responder);
  // Consulted when the script has no entry, before the fixed fallback.
  void set_fallback_responder(Responder responder);
  // The next k calls fail with a retryable error.
  void fail_next(int k);

  std::string name() const override { return "mock"; }
  AttemptOutcome send(const std::vector<ChatMessage>& messages, const LlmConfig& config,
                      double temperature) override;

  int calls() const;
  std::size_t script_size() const;

 private:
  mutable std::mutex mutex_;
  std::map<std::string, std::string> script_;
  std::string fallback_;
  Responder responder_;
  Responder fallback_responder_;
  int failures_left_ = 0;
  int calls_ = 0;
};

using Sleeper = std::function<void(std::chrono::duration<double>)>;
void real_sleep(std::chrono::duration<double> delay);

// Delays in seconds before retries 1..n; non-decreasing.
std::vector<double> backoff_schedule(const LlmConfig& config, int retries, std::uint64_t seed);

// Spaces requests at least 60/rpm seconds apart across all callers.
class RateLimiter {
 public:
  using Clock = std::chrono::steady_clock;
  explicit RateLimiter(double requests_per_minute, Sleeper sleeper = real_sleep);
  void acquire();

 private:
  std::mutex mutex_;
  double interval_ = 0.0;
  Clock::time_point next_{};
  Sleeper sleeper_;
};

class Gateway {
 public:
  Gateway(std::shared_ptr<ChatProvider> provider, LlmConfig config, Sleeper sleeper,
          std::shared_ptr<RateLimiter> limiter);
  Gateway(std::shared_ptr<ChatProvider> provider, LlmConfig config,
          Sleeper sleeper = real_sleep);

  // Uses config.temperature.
  ChatResult chat(const PromptBundle& bundle) const;
  ChatResult chat(const std::vector<ChatMessage>& messages, double temperature) const;

  // Same provider and rate limiter, different settings.
  Gateway with_config(LlmConfig config) const;

  const LlmConfig& config() const { return config_; }
  ChatProvider& provider() const { return *provider_; }

 private:
  std::shared_ptr<ChatProvider> provider_;
  LlmConfig config_;
  Sleeper sleeper_;
  std::shared_ptr<RateLimiter> limiter_;
};

}  // namespace xgw

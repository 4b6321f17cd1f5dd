#include <doctest.h>

#include <atomic>
#include <cstdlib>
#include <sstream>
#include <thread>

#include <httplib.h>

#include "xgw/error.hpp"
#include "xgw/llm.hpp"

using namespace xgw;

namespace {

std::vector<ChatMessage> prompt(const std::string& text) { return {{Role::kUser, text, MessageStage::kJudge}}; }

struct SleepLog {
  std::shared_ptr<std::vector<double>> delays = std::make_shared<std::vector<double>>();
  Sleeper sleeper() const {
    auto d = delays;
    return [d](std::chrono::duration<double> s) { d->push_back(s.count()); };
  }
};

LlmConfig mock_config() {
  LlmConfig c;
  c.model_name = "mock";
  return c;
}

// Local chat-completion endpoint with a scripted sequence of statuses.
class FakeServer {
 public:
  explicit FakeServer(std::vector<int> statuses) : statuses_(std::move(statuses)) {
    server_.Post("/v1/chat/completions", [this](const httplib::Request& req, httplib::Response& res) {
      const int k = hits_++;
      last_auth_ = req.get_header_value("Authorization");
      last_body_ = req.body;
      const int status = k < static_cast<int>(statuses_.size()) ? statuses_[k] : 200;
      res.status = status;
      if (status == 200) {
        res.set_content(R"({"choices":[{"message":{"role":"assistant","content":"served"}}],"usage":{"total_tokens":3}})",
                        "application/json");
      } else {
        res.set_content(R"({"error":"no"})", "application/json");
      }
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~FakeServer() {
    server_.stop();
    thread_.join();
  }
  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1/chat/completions"; }
  int hits() const { return hits_; }
  std::string last_auth() const { return last_auth_; }
  std::string last_body() const { return last_body_; }

 private:
  httplib::Server server_;
  std::vector<int> statuses_;
  std::atomic<int> hits_{0};
  std::string last_auth_;
  std::string last_body_;
  int port_ = 0;
  std::thread thread_;
};

}  // namespace

TEST_CASE("mock provider replies from its script") {
  auto mock = std::make_shared<MockProvider>();
  const auto rank = prompt("Rank this text");
  const auto label = prompt("Which factor");
  mock->set_reply(fingerprint(rank), "4");
  mock->set_reply(fingerprint(label), "positive");
  const Gateway gateway(mock, mock_config());
  CHECK(gateway.chat(rank, 0.0).text == "4");
  const ChatResult r = gateway.chat(label, 0.0);
  CHECK(r.text == "positive");
  CHECK(r.attempts == 1);
  CHECK(gateway.chat(prompt("unscripted"), 0.0).text == "not contributing");
  CHECK(mock->calls() == 3);
}

TEST_CASE("canned reply") {
  auto mock = std::make_shared<MockProvider>(std::map<std::string, std::string>{}, "OK");
  PromptBundle bundle;
  bundle.messages = prompt("anything");
  const PromptBundle before = bundle;
  const ChatResult r = Gateway(mock, mock_config()).chat(bundle);
  CHECK(r.text == "OK");
  CHECK(r.attempts == 1);
  CHECK(bundle == before);
  CHECK(r.provider_meta["attempts"] == 1);
}

TEST_CASE("responders take precedence in order") {
  auto mock = std::make_shared<MockProvider>();
  const auto a = prompt("a");
  mock->set_reply(fingerprint(a), "scripted");
  mock->set_fallback_responder([](const std::vector<ChatMessage>& m) -> std::optional<std::string> {
    return "echo:" + m.back().content;
  });
  const Gateway g(mock, mock_config());
  CHECK(g.chat(a, 0).text == "scripted");
  CHECK(g.chat(prompt("b"), 0).text == "echo:b");
  mock->set_responder([](const std::vector<ChatMessage>& m) -> std::optional<std::string> {
    if (m.back().content == "a") return "first";
    return std::nullopt;
  });
  CHECK(g.chat(a, 0).text == "first");
  CHECK(g.chat(prompt("b"), 0).text == "echo:b");
}

TEST_CASE("retries until success") {
  auto mock = std::make_shared<MockProvider>(std::map<std::string, std::string>{}, "done");
  mock->fail_next(2);
  SleepLog log;
  LlmConfig config = mock_config();
  config.max_retries = 3;
  const ChatResult r = Gateway(mock, config, log.sleeper()).chat(prompt("x"), 0.0);
  CHECK(r.text == "done");
  CHECK(r.attempts == 3);
  REQUIRE(log.delays->size() == 2);
  const auto schedule = backoff_schedule(config, 3, config.jitter_seed ^ std::stoull(fingerprint(prompt("x")), nullptr, 16));
  CHECK((*log.delays)[0] == doctest::Approx(schedule[0]));
  CHECK((*log.delays)[1] == doctest::Approx(schedule[1]));
  CHECK(r.provider_meta["errors"].size() == 2);
}

TEST_CASE("exhausted retries carry the last cause") {
  auto mock = std::make_shared<MockProvider>();
  mock->fail_next(10);
  SleepLog log;
  LlmConfig config = mock_config();
  config.max_retries = 2;
  try {
    Gateway(mock, config, log.sleeper()).chat(prompt("x"), 0.0);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kGateway);
    CHECK(std::string(e.what()).find("3 attempts") != std::string::npos);
    CHECK_FALSE(e.detail().empty());
  }
  CHECK(mock->calls() == 3);
  CHECK(log.delays->size() == 2);
}

TEST_CASE("backoff schedule") {
  LlmConfig config;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto s = backoff_schedule(config, 6, seed);
    REQUIRE(s.size() == 6);
    for (std::size_t k = 0; k < s.size(); ++k) {
      const double nominal = std::pow(2.0, static_cast<double>(k));
      CHECK(s[k] >= nominal * 0.8 - 1e-12);
      if (k > 0) CHECK(s[k] >= s[k - 1]);
    }
    CHECK(s[0] <= 1.2);
    CHECK(backoff_schedule(config, 6, seed) == s);
  }
  config.backoff_jitter = 0.0;
  CHECK(backoff_schedule(config, 3, 1) == std::vector<double>{1, 2, 4});
}

TEST_CASE("configuration is validated before any attempt") {
  auto http = std::make_shared<HttpChatProvider>();
  LlmConfig config;
  config.model_name = "m";
  for (const char* url : {"", "ftp://host/x", "not a url", "http://"}) {
    config.endpoint_url = url;
    try {
      Gateway(http, config).chat(prompt("x"), 0.0);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kConfiguration);
    }
  }
  config.endpoint_url = "http://127.0.0.1:9/v1/chat/completions";
  config.api_key_env_var = "XGW_TEST_KEY_THAT_IS_NOT_SET";
  ::unsetenv("XGW_TEST_KEY_THAT_IS_NOT_SET");
  try {
    Gateway(http, config).chat(prompt("x"), 0.0);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kConfiguration);
    CHECK(std::string(e.what()).find("XGW_TEST_KEY_THAT_IS_NOT_SET") != std::string::npos);
  }
  LlmConfig bad = mock_config();
  bad.max_retries = -1;
  CHECK_THROWS_AS(validate(bad), Error);
  bad = mock_config();
  bad.timeout_seconds = 0;
  CHECK_THROWS_AS(validate(bad), Error);
}

TEST_CASE("endpoint parsing") {
  const EndpointUrl u = parse_endpoint_url("https://api.example.com/v1/chat/completions");
  CHECK(u.scheme == "https");
  CHECK(u.host == "api.example.com");
  CHECK(u.port == 443);
  CHECK(u.path == "/v1/chat/completions");
  const EndpointUrl v = parse_endpoint_url("http://localhost:8000");
  CHECK(v.port == 8000);
  CHECK(v.path == "/");
}

TEST_CASE("wire format") {
  const nlohmann::json body = chat_request_body({{Role::kSystem, "s"}, {Role::kUser, "u"}}, "m", 0.7);
  CHECK(body["model"] == "m");
  CHECK(body["temperature"] == 0.7);
  CHECK(body["messages"][0]["role"] == "system");
  CHECK(body["messages"][1]["content"] == "u");
  CHECK(parse_chat_response(R"({"choices":[{"message":{"content":"hi"}}]})") == "hi");
  CHECK_THROWS_AS(parse_chat_response("{}"), Error);
  CHECK_THROWS_AS(parse_chat_response("not json"), Error);
}

TEST_CASE("http provider against a local endpoint") {
  ::setenv("XGW_TEST_API_KEY", "sekret-value", 1);
  SUBCASE("success sends the key and parses the reply") {
    FakeServer server({});
    LlmConfig config;
    config.endpoint_url = server.url();
    config.model_name = "local";
    config.api_key_env_var = "XGW_TEST_API_KEY";
    const ChatResult r = Gateway(std::make_shared<HttpChatProvider>(), config).chat(prompt("hello"), 0.25);
    CHECK(r.text == "served");
    CHECK(r.attempts == 1);
    CHECK(server.last_auth() == "Bearer sekret-value");
    const auto sent = nlohmann::json::parse(server.last_body());
    CHECK(sent["temperature"] == 0.25);
    CHECK(sent["messages"][0]["content"] == "hello");
    CHECK(r.provider_meta.dump().find("sekret") == std::string::npos);
  }
  SUBCASE("server errors and rate limits are retried") {
    FakeServer server({500, 429});
    LlmConfig config;
    config.endpoint_url = server.url();
    config.model_name = "local";
    SleepLog log;
    const ChatResult r = Gateway(std::make_shared<HttpChatProvider>(), config, log.sleeper()).chat(prompt("x"), 0);
    CHECK(r.text == "served");
    CHECK(r.attempts == 3);
    CHECK(server.hits() == 3);
  }
  SUBCASE("client errors are not retried") {
    FakeServer server({400});
    LlmConfig config;
    config.endpoint_url = server.url();
    config.model_name = "local";
    SleepLog log;
    try {
      Gateway(std::make_shared<HttpChatProvider>(), config, log.sleeper()).chat(prompt("x"), 0);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kGateway);
      CHECK(e.detail().find("400") != std::string::npos);
    }
    CHECK(server.hits() == 1);
    CHECK(log.delays->empty());
  }
  SUBCASE("transport errors are retried") {
    LlmConfig config;
    config.endpoint_url = "http://127.0.0.1:9/v1/chat/completions";
    config.model_name = "local";
    config.max_retries = 1;
    config.timeout_seconds = 2;
    SleepLog log;
    CHECK_THROWS_AS(Gateway(std::make_shared<HttpChatProvider>(), config, log.sleeper()).chat(prompt("x"), 0), Error);
    CHECK(log.delays->size() == 1);
  }
}

TEST_CASE("rate limiter spaces requests") {
  SleepLog log;
  RateLimiter limiter(120.0, log.sleeper());
  for (int i = 0; i < 4; ++i) limiter.acquire();
  REQUIRE(log.delays->size() == 3);
  for (int k = 0; k < 3; ++k) {
    CHECK((*log.delays)[k] == doctest::Approx(0.5 * (k + 1)).epsilon(0.02));
  }
  SleepLog none;
  RateLimiter off(0.0, none.sleeper());
  for (int i = 0; i < 4; ++i) off.acquire();
  CHECK(none.delays->empty());
}

TEST_CASE("gateways derived with a new config share the limiter") {
  SleepLog log;
  LlmConfig config = mock_config();
  config.requests_per_minute = 60;
  auto mock = std::make_shared<MockProvider>();
  const Gateway a(mock, config, log.sleeper());
  LlmConfig judge = config;
  judge.temperature = 0.0;
  const Gateway b = a.with_config(judge);
  CHECK(b.config().temperature == 0.0);
  a.chat(prompt("1"), 0);
  b.chat(prompt("2"), 0);
  CHECK(log.delays->size() == 1);
  CHECK(mock->calls() == 2);
}

TEST_CASE("mock script files") {
  std::istringstream in("fingerprint\treply\nabc\tline one\\nline two\n*\tfallback text\n");
  const MockScript script = parse_mock_script(in);
  CHECK(script.replies.at("abc") == "line one\nline two");
  CHECK(script.fallback == "fallback text");
  std::ostringstream out;
  write_mock_script(out, script);
  std::istringstream again(out.str());
  const MockScript back = parse_mock_script(again);
  CHECK(back.replies == script.replies);
  CHECK(back.fallback == script.fallback);
  MockProvider provider(script);
  CHECK(provider.script_size() == 1);
  std::istringstream bad("fingerprint\treply\nno tab here\n");
  CHECK_THROWS_AS(parse_mock_script(bad), Error);
}

TEST_CASE("concurrent calls through one gateway") {
  auto mock = std::make_shared<MockProvider>(std::map<std::string, std::string>{}, "r");
  const Gateway g(mock, mock_config());
  std::vector<std::thread> threads;
  std::atomic<int> ok{0};
  for (int t = 0; t < 8; ++t) {
    threads.emplace_back([&] {
      for (int i = 0; i < 50; ++i) ok += g.chat(prompt("p"), 0).text == "r" ? 1 : 0;
    });
  }
  for (auto& t : threads) t.join();
  CHECK(ok == 400);
  CHECK(mock->calls() == 400);
}

#include <atomic>
#include <thread>

#include "doctest.h"
#include "httplib.h"
#include "planverify/llm_backend.hpp"

using namespace planverify;

namespace {

// Local endpoint on an ephemeral port; handlers run on the server thread.
class FakeEndpoint {
 public:
  explicit FakeEndpoint(httplib::Server::Handler h) {
    server_.Post("/v1/complete", std::move(h));
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~FakeEndpoint() {
    server_.stop();
    thread_.join();
  }
  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1/complete"; }

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

EndpointConfig config_for(const std::string& url) {
  EndpointConfig c;
  c.url = url;
  c.model = "test-model";
  c.response_path = "choices.0.text";
  c.timeout_ms = 2000;
  c.retries = 2;
  c.backoff_ms = 1;
  return c;
}

}  // namespace

TEST_CASE("extract_response_text") {
  CHECK(extract_response_text(R"({"text":"keep"})", "text") == "keep");
  CHECK(extract_response_text(R"({"choices":[{"text":"a"},{"text":"b"}]})", "choices.1.text") == "b");
  CHECK(extract_response_text(R"({"a":{"b":"c"}})", "a.b") == "c");
  CHECK_THROWS_AS(extract_response_text("not json", "text"), MalformedResponse);
  CHECK_THROWS_AS(extract_response_text(R"({"text":3})", "text"), MalformedResponse);
  CHECK_THROWS_AS(extract_response_text(R"({"choices":[]})", "choices.0.text"), MalformedResponse);
  CHECK_THROWS_AS(extract_response_text(R"({"choices":[1]})", "choices.x"), MalformedResponse);
  CHECK_THROWS_AS(extract_response_text(R"({"t":"x"})", "text"), MalformedResponse);
}

TEST_CASE("endpoint config validation") {
  EndpointConfig c;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c.url = "ftp://x";
  c.model = "m";
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c.url = "http://x";
  CHECK_NOTHROW(c.validate());
}

TEST_CASE("llm backend against a local endpoint") {
  SUBCASE("request shape and bearer token") {
    std::string auth;
    std::string body;
    FakeEndpoint ep([&](const httplib::Request& req, httplib::Response& res) {
      auth = req.get_header_value("Authorization");
      body = req.body;
      res.set_content(R"({"choices":[{"text":"KEEP"}]})", "application/json");
    });
    auto cfg = config_for(ep.url());
    cfg.api_key = "sekret";
    LlmBackend be(cfg);
    CHECK(be.call("hello") == "KEEP");
    CHECK(auth == "Bearer sekret");
    CHECK(body.find("\"model\":\"test-model\"") != std::string::npos);
    CHECK(body.find("\"prompt\":\"hello\"") != std::string::npos);
  }
  SUBCASE("no authorization header without a key") {
    bool had_auth = true;
    FakeEndpoint ep([&](const httplib::Request& req, httplib::Response& res) {
      had_auth = req.has_header("Authorization");
      res.set_content(R"({"choices":[{"text":"x"}]})", "application/json");
    });
    LlmBackend be(config_for(ep.url()));
    be.call("p");
    CHECK_FALSE(had_auth);
  }
  SUBCASE("server errors are retried") {
    std::atomic<int> hits = 0;
    FakeEndpoint ep([&](const httplib::Request&, httplib::Response& res) {
      if (++hits < 3) {
        res.status = 503;
        return;
      }
      res.set_content(R"({"choices":[{"text":"remove"}]})", "application/json");
    });
    LlmBackend be(config_for(ep.url()));
    CHECK(be.call("p") == "remove");
    CHECK(hits == 3);
  }
  SUBCASE("retries are bounded") {
    std::atomic<int> hits = 0;
    FakeEndpoint ep([&](const httplib::Request&, httplib::Response& res) {
      ++hits;
      res.status = 500;
    });
    LlmBackend be(config_for(ep.url()));
    CHECK_THROWS_AS(be.call("p"), NetworkError);
    CHECK(hits == 3);
  }
  SUBCASE("client errors are not retried") {
    std::atomic<int> hits = 0;
    FakeEndpoint ep([&](const httplib::Request&, httplib::Response& res) {
      ++hits;
      res.status = 401;
    });
    LlmBackend be(config_for(ep.url()));
    CHECK_THROWS_AS(be.call("p"), BackendError);
    CHECK(hits == 1);
  }
  SUBCASE("slow endpoint times out") {
    FakeEndpoint ep([&](const httplib::Request&, httplib::Response& res) {
      std::this_thread::sleep_for(std::chrono::milliseconds(600));
      res.set_content(R"({"choices":[{"text":"x"}]})", "application/json");
    });
    auto cfg = config_for(ep.url());
    cfg.timeout_ms = 100;
    cfg.retries = 0;
    LlmBackend be(cfg);
    CHECK_THROWS_AS(be.call("p"), NetworkError);
  }
  SUBCASE("judge parses the verdict") {
    FakeEndpoint ep([&](const httplib::Request&, httplib::Response& res) {
      res.set_content(R"({"choices":[{"text":"Verdict follows. {\"verdict\": \"augment\", \"new_action\": \"add tea bag\"}"}]})",
                      "application/json");
    });
    LlmBackend be(config_for(ep.url()));
    JudgeRequest r;
    r.task = "Make tea";
    r.current = Action::from_text("pour hot water");
    const JudgeDecision d = be.judge(r);
    CHECK(d.verdict == Verdict::Augment);
    CHECK(d.new_action == "add tea bag");
  }
}

TEST_CASE("unreachable endpoint raises NetworkError") {
  auto cfg = config_for("http://127.0.0.1:1/none");
  cfg.retries = 1;
  LlmBackend be(cfg);
  CHECK_THROWS_AS(be.call("p"), NetworkError);
}

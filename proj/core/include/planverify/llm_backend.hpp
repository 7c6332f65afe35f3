// llm_backend.hpp - judge and translation through a single HTTP JSON
// endpoint.
//
// Wire protocol:
//   POST <endpoint.url>
//   Authorization: Bearer $PLANVERIFY_API_KEY      (when set)
//   {"model": "...", "prompt": "...", "temperature": 0}
//
// The answer text is read from the response JSON at `response_path`, a
// dotted path where numeric segments index arrays ("choices.0.text").
#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "planverify/backend.hpp"

namespace planverify {

inline constexpr const char* kApiKeyEnv = "PLANVERIFY_API_KEY";

struct EndpointConfig {
  std::string url;
  std::string model;
  std::string response_path = "text";
  double temperature = 0.0;
  int timeout_ms = 30000;
  int retries = 2;       // extra attempts on network failure
  int backoff_ms = 500;  // doubled after each failed attempt
  std::string api_key;   // usually filled from kApiKeyEnv

  /// Throws std::invalid_argument when url or model is missing.
  void validate() const;
};

struct HttpResponse {
  int status = 0;
  std::string body;
};

class HttpTransport {
 public:
  virtual ~HttpTransport() = default;
  /// Throws NetworkError / TimeoutError when no HTTP response was obtained.
  virtual HttpResponse post(const std::string& url, const std::string& body,
                            const std::vector<std::pair<std::string, std::string>>& headers, int timeout_ms) = 0;
};

/// Plain-HTTP transport backed by cpp-httplib.
std::shared_ptr<HttpTransport> make_http_transport();

/// Throws MalformedResponse if `path` does not lead to a string.
std::string extract_response_text(std::string_view body, std::string_view path);

class LlmBackend final : public Backend {
 public:
  explicit LlmBackend(EndpointConfig cfg, std::shared_ptr<HttpTransport> transport = make_http_transport());

  JudgeDecision judge(const JudgeRequest& r) override;
  std::string complete(const TranslationRequest& r) override;
  std::string name() const override { return "llm(" + cfg_.model + ")"; }

  /// One completion round-trip with network retries.
  std::string call(const std::string& prompt);

 private:
  EndpointConfig cfg_;
  std::shared_ptr<HttpTransport> transport_;
};

}  // namespace planverify

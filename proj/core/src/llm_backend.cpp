#include "planverify/llm_backend.hpp"

#include <chrono>
#include <thread>

#include "httplib.h"
#include "json.hpp"

namespace planverify {

using nlohmann::json;

void EndpointConfig::validate() const {
  if (url.empty()) throw std::invalid_argument("endpoint.url is not set");
  if (model.empty()) throw std::invalid_argument("endpoint.model is not set");
  if (!url.starts_with("http://") && !url.starts_with("https://")) {
    throw std::invalid_argument("endpoint.url must start with http:// or https://");
  }
  if (timeout_ms <= 0) throw std::invalid_argument("endpoint.timeout_ms must be positive");
  if (retries < 0) throw std::invalid_argument("endpoint.retries must be >= 0");
}

namespace {

class HttplibTransport final : public HttpTransport {
 public:
  HttpResponse post(const std::string& url, const std::string& body,
                    const std::vector<std::pair<std::string, std::string>>& headers, int timeout_ms) override {
    const auto scheme_end = url.find("://");
    const auto path_start = url.find('/', scheme_end == std::string::npos ? 0 : scheme_end + 3);
    const std::string origin = path_start == std::string::npos ? url : url.substr(0, path_start);
    const std::string path = path_start == std::string::npos ? "/" : url.substr(path_start);

    httplib::Client client(origin);
    const auto sec = timeout_ms / 1000;
    const auto usec = (timeout_ms % 1000) * 1000;
    client.set_connection_timeout(sec, usec);
    client.set_read_timeout(sec, usec);
    client.set_write_timeout(sec, usec);

    httplib::Headers h;
    for (const auto& [k, v] : headers) h.emplace(k, v);
    auto res = client.Post(path, h, body, "application/json");
    if (!res) {
      const auto err = res.error();
      const std::string what = "POST " + url + " failed: " + httplib::to_string(err);
      if (err == httplib::Error::ConnectionTimeout || err == httplib::Error::Read) throw TimeoutError(what);
      throw NetworkError(what);
    }
    return HttpResponse{res->status, res->body};
  }
};

}  // namespace

std::shared_ptr<HttpTransport> make_http_transport() { return std::make_shared<HttplibTransport>(); }

std::string extract_response_text(std::string_view body, std::string_view path) {
  json j = json::parse(body, nullptr, false);
  if (j.is_discarded()) throw MalformedResponse("endpoint response is not JSON");
  const json* cur = &j;
  std::size_t pos = 0;
  while (pos <= path.size() && !path.empty()) {
    const auto dot = path.find('.', pos);
    const std::string seg(path.substr(pos, dot == std::string_view::npos ? std::string_view::npos : dot - pos));
    if (cur->is_array()) {
      std::size_t idx = 0;
      try {
        idx = std::stoul(seg);
      } catch (const std::exception&) {
        throw MalformedResponse("response path segment '" + seg + "' is not an array index");
      }
      if (idx >= cur->size()) throw MalformedResponse("response path index " + seg + " out of range");
      cur = &(*cur)[idx];
    } else if (cur->is_object()) {
      auto it = cur->find(seg);
      if (it == cur->end()) throw MalformedResponse("response lacks field '" + seg + "'");
      cur = &*it;
    } else {
      throw MalformedResponse("response path '" + std::string(path) + "' runs past a scalar");
    }
    if (dot == std::string_view::npos) break;
    pos = dot + 1;
  }
  if (!cur->is_string()) throw MalformedResponse("response path '" + std::string(path) + "' is not a string");
  return cur->get<std::string>();
}

LlmBackend::LlmBackend(EndpointConfig cfg, std::shared_ptr<HttpTransport> transport)
    : cfg_(std::move(cfg)), transport_(std::move(transport)) {
  cfg_.validate();
}

std::string LlmBackend::call(const std::string& prompt) {
  json req;
  req["model"] = cfg_.model;
  req["prompt"] = prompt;
  req["temperature"] = cfg_.temperature;
  const std::string body = req.dump(-1, ' ', false, json::error_handler_t::replace);

  std::vector<std::pair<std::string, std::string>> headers;
  if (!cfg_.api_key.empty()) headers.emplace_back("Authorization", "Bearer " + cfg_.api_key);

  int delay_ms = cfg_.backoff_ms;
  for (int attempt = 0;; ++attempt) {
    try {
      HttpResponse res = transport_->post(cfg_.url, body, headers, cfg_.timeout_ms);
      if (res.status == 429 || res.status >= 500) {
        throw NetworkError("endpoint returned HTTP " + std::to_string(res.status));
      }
      if (res.status < 200 || res.status >= 300) {
        throw BackendError("endpoint returned HTTP " + std::to_string(res.status) + ": " + res.body.substr(0, 200));
      }
      return extract_response_text(res.body, cfg_.response_path);
    } catch (const NetworkError&) {
      if (attempt >= cfg_.retries) throw;
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(delay_ms));
    delay_ms *= 2;
  }
}

JudgeDecision LlmBackend::judge(const JudgeRequest& r) { return parse_decision(call(build_prompt(r))); }

std::string LlmBackend::complete(const TranslationRequest& r) { return call(r.prompt); }

}  // namespace planverify

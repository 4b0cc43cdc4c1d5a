#include "galois/http_backend.hpp"

#include <chrono>
#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "galois/errors.hpp"

namespace galois::backend {

namespace {

constexpr const char* kPath = "/v1/chat/completions";

std::string excerpt(const std::string& text) {
  if (text.size() <= 200) return text;
  return text.substr(0, 200) + "...";
}

}  // namespace

HttpBackend::HttpBackend(HttpConfig config) : config_(std::move(config)) {
  while (!config_.base_url.empty() && config_.base_url.back() == '/') {
    config_.base_url.pop_back();
  }
  if (!config_.sleep) {
    config_.sleep = [](double seconds) {
      std::this_thread::sleep_for(std::chrono::duration<double>(seconds));
    };
  }
}

std::string HttpBackend::request_body(const CompletionRequest& request,
                                      const std::string& model) {
  nlohmann::ordered_json body;
  body["model"] = model;
  body["temperature"] = request.temperature;
  body["messages"] = nlohmann::ordered_json::array();
  auto message = [&](const char* role, const std::string& content) {
    body["messages"].push_back({{"role", role}, {"content", content}});
  };
  if (!request.prompt.preamble.empty()) message("system", request.prompt.preamble);
  for (const Turn& turn : request.conversation) {
    message("user", turn.prompt_body);
    message("assistant", turn.response);
  }
  message("user", request.prompt.body);
  return body.dump();
}

std::string HttpBackend::complete(const CompletionRequest& request) {
  count(request);
  const std::string body = request_body(request, config_.model);

  httplib::Headers headers;
  if (const char* key = std::getenv(config_.api_key_env.c_str()); key && *key) {
    headers.emplace("Authorization", std::string("Bearer ") + key);
  }

  std::string last_error = "no attempt made";
  int last_status = 0;
  for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
    if (attempt > 0) config_.sleep(0.5 * static_cast<double>(1 << (attempt - 1)));

    httplib::Client client(config_.base_url);
    client.set_connection_timeout(config_.timeout_seconds, 0);
    client.set_read_timeout(config_.timeout_seconds, 0);
    client.set_write_timeout(config_.timeout_seconds, 0);

    auto result = client.Post(kPath, headers, body, "application/json");
    if (!result) {
      last_error = "transport error: " + httplib::to_string(result.error());
      last_status = 0;
      continue;
    }
    if (result->status == 429 || result->status >= 500) {
      last_error = "status " + std::to_string(result->status) + ": " + excerpt(result->body);
      last_status = result->status;
      continue;
    }
    if (result->status != 200) {
      throw BackendError("backend rejected the request, status " +
                             std::to_string(result->status) + ": " + excerpt(result->body),
                         result->status);
    }
    try {
      auto doc = nlohmann::json::parse(result->body);
      return doc.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      throw BackendError("malformed backend response: " + std::string(e.what()) + " in " +
                             excerpt(result->body),
                         result->status);
    }
  }
  throw BackendError("backend unreachable after " + std::to_string(config_.max_retries + 1) +
                         " attempts; last error: " + last_error,
                     last_status);
}

}  // namespace galois::backend

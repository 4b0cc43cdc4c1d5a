#pragma once

#include <functional>
#include <string>

#include "galois/backend.hpp"

namespace galois::backend {

struct HttpConfig {
  std::string base_url;  // scheme://host[:port], no trailing path
  std::string model = "gpt-3.5-turbo";
  int timeout_seconds = 60;
  std::string api_key_env = "GALOIS_API_KEY";
  int max_retries = 3;  // extra attempts after the first, on 429/5xx/transport
  std::function<void(double)> sleep;  // seconds; injectable for tests
};

// Chat-completions client. Posts to <base_url>/v1/chat/completions with the
// preamble as the system message and the conversation replayed as
// alternating user and assistant messages. Retries with 0.5s, 1s, 2s
// backoff. Other failures and malformed responses throw immediately.
class HttpBackend final : public Backend {
 public:
  explicit HttpBackend(HttpConfig config);

  std::string complete(const CompletionRequest& request) override;

  // The exact bytes sent on the wire, exposed so tests can pin the contract.
  static std::string request_body(const CompletionRequest& request, const std::string& model);

 private:
  HttpConfig config_;
};

}  // namespace galois::backend

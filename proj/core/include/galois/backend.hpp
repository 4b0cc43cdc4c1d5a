#pragma once

#include <atomic>
#include <cstdint>
#include <string>
#include <vector>

#include "galois/prompt.hpp"

namespace galois::backend {

// One earlier exchange of a scan conversation, oldest first.
struct Turn {
  std::string prompt_body;
  std::string response;
};

struct CompletionRequest {
  prompt::Prompt prompt;
  std::vector<Turn> conversation;  // empty outside scan continuations
  double temperature = 0.0;        // the engine always issues 0
  int max_tokens = 256;
};

struct StatsSnapshot {
  std::uint64_t calls = 0;
  std::uint64_t prompt_chars = 0;  // rough cost proxy: preamble + body bytes
};

// A model endpoint. Implementations must be safe to call from several
// threads at once; the executor fans fetch and filter prompts out.
class Backend {
 public:
  virtual ~Backend() = default;

  // Returns the raw completion text. Throws BackendError on failure.
  virtual std::string complete(const CompletionRequest& request) = 0;

  StatsSnapshot stats() const {
    return {calls_.load(), prompt_chars_.load()};
  }

 protected:
  void count(const CompletionRequest& request) {
    calls_.fetch_add(1);
    prompt_chars_.fetch_add(request.prompt.preamble.size() + request.prompt.body.size());
  }

 private:
  std::atomic<std::uint64_t> calls_{0};
  std::atomic<std::uint64_t> prompt_chars_{0};
};

}  // namespace galois::backend

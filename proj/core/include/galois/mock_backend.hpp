#pragma once

#include "galois/backend.hpp"
#include "galois/fact_store.hpp"
#include "galois/prompt.hpp"

namespace galois::backend {

// Offline stand-in for a model endpoint. Prompts are reverse-matched
// against the template set; answers come from the fact store, distorted by
// the noise config. Every answer is a pure function of the prompt bytes,
// the conversation so far, and the (store, noise, templates) triple, so
// runs are reproducible byte for byte.
class MockBackend final : public Backend {
 public:
  MockBackend(FactStore store, NoiseConfig noise,
              prompt::TemplateSet templates = prompt::TemplateSet::default_set());

  // Throws BackendError when no template matches, which usually means the
  // compiler and the matcher disagree about the template set.
  std::string complete(const CompletionRequest& request) override;

  const FactStore& store() const { return store_; }

 private:
  std::string answer_scan(const prompt::MatchedScan& scan, std::size_t page) const;
  std::string answer_fetch(const prompt::MatchedFetch& fetch) const;
  std::string answer_filter(const prompt::MatchedFilter& filter) const;
  std::string answer_question(const prompt::MatchedQuestion& question) const;

  bool dropped(const std::string& relation, const std::string& key) const;
  std::string apply_value_noise(std::string value, const std::string& relation,
                                const std::string& key, const std::string& attribute) const;

  FactStore store_;
  NoiseConfig noise_;
  prompt::TemplateMatcher matcher_;
};

// True when the stored value satisfies "stored op literal". Both sides
// compare numerically when both parse as plain numbers, bytewise otherwise.
bool mock_condition_holds(const std::string& stored, sql::CompareOp op,
                          const std::string& literal);

}  // namespace galois::backend

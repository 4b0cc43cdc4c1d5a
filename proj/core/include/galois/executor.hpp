#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "galois/backend.hpp"
#include "galois/normalize.hpp"
#include "galois/planner.hpp"
#include "galois/prompt.hpp"
#include "galois/relation.hpp"

namespace galois::exec {

// Equality folding applied to join keys, for joins that would otherwise
// break on surface mismatches like IT versus ITA.
enum class JoinFold { None, Case };

struct ExecConfig {
  int max_iterations = 10;  // scan conversation budget
  int batch_size = 8;       // fetch/filter prompts in flight at once
  std::optional<std::int64_t> row_cap;
  JoinFold join_fold = JoinFold::None;
  std::map<std::string, std::string> join_alias;  // join-key canonical forms
  norm::RejectionSink on_reject;  // domain rejections; called from worker threads
};

// Drives one scan conversation: initial prompt, then the continuation until
// the model refuses, contributes nothing new, or the iteration budget ends.
// Returns raw items in first-seen order.
std::vector<std::string> run_scan(const prompt::PromptProgram& program,
                                  backend::Backend& backend, const ExecConfig& config);

// One fetch prompt per key, batched. Returns canonical key rendering to the
// normalized, domain-checked cell.
std::map<std::string, Cell> run_fetch(const RelationDecl& relation,
                                      const std::vector<Cell>& keys,
                                      const AttrDecl& attribute, backend::Backend& backend,
                                      const prompt::Compiler& compiler,
                                      const ExecConfig& config);

// One yes/no prompt per key, batched. Yes keeps the key; No and Unknown
// drop it (Unknown with a warning).
std::set<std::string> run_llm_filter(const RelationDecl& relation,
                                     const std::vector<Cell>& keys,
                                     const prompt::Condition& condition,
                                     backend::Backend& backend,
                                     const prompt::Compiler& compiler,
                                     const ExecConfig& config);

// Materializes a local CSV source with columns named "<prefix>.<attribute>".
// Cells parse strictly by declared type; empty fields are Null.
Relation load_local_table(const RelationDecl& relation, const std::string& prefix);

// Runs a physical plan to completion. Output columns follow the query's
// select list. Without ORDER BY, rows end up in a canonical order (sorted
// by every column left to right) so repeated runs serialize identically.
Relation execute(const plan::PhysicalPlan& plan, backend::Backend& backend,
                 const prompt::Compiler& compiler, const ExecConfig& config = {});

struct NlResult {
  std::string raw;
  Relation parsed;  // one text column "answer", one row per list item
};

// Whole-query natural language baseline, bypassing the planner.
NlResult run_nl(const std::string& question, prompt::NlMode mode, backend::Backend& backend,
                const prompt::Compiler& compiler);

}  // namespace galois::exec

#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <regex>
#include <string>
#include <variant>
#include <vector>

#include "galois/catalog.hpp"
#include "galois/cell.hpp"
#include "galois/sql_ast.hpp"

namespace galois::prompt {

// Expected answer shape, used to pick the preamble and the parser.
enum class Shape { ValueList, SingleValue, YesNo, FreeText };

struct Prompt {
  std::string preamble;  // system message; may be empty on continuations
  std::string body;      // user message
  Shape shape = Shape::SingleValue;
};

struct StopPolicy {
  int max_iterations = 10;  // the no-new-results rule always applies too
};

// A scan is a conversation: one initial prompt plus a fixed continuation
// repeated until the stop policy ends it.
struct PromptProgram {
  Prompt initial;
  Prompt continuation;
  StopPolicy stop;
};

// The comparison vocabulary used inside prompt bodies.
// "=" reads "equal to", "!=" "different from", "<" "less than",
// ">" "greater than", "<=" "at most", ">=" "at least".
const char* operator_phrase(sql::CompareOp op);
std::optional<sql::CompareOp> parse_operator_phrase(std::string_view phrase);

// A single-attribute comparison against a literal, decoupled from the
// planner so prompt code stays independent of plan types.
struct Condition {
  std::string attribute;
  sql::CompareOp op = sql::CompareOp::Eq;
  Cell value;
};

// Template text with {placeholder} slots. The placeholders each template
// understands are fixed: scan uses {key} (the key attribute name) and
// {relation}; scan_fused adds {attribute}, {op}, {value}; fetch uses
// {attribute}, {relation}, {key} (the key value); filter uses {relation},
// {key}, {attribute}, {op}, {value}; nl_plain and nl_cot use {question}.
struct TemplateSet {
  std::string scan;
  std::string scan_fused;
  std::string scan_continue;  // matched byte for byte, no placeholders
  std::string fetch;
  std::string filter;
  std::string nl_plain;
  std::string nl_cot;
  std::string preamble_qa;
  std::string preamble_list;

  static TemplateSet default_set();

  // Loads <name>.txt per template from a directory, keeping the default
  // for any missing file. Trailing newlines are stripped.
  static TemplateSet load_dir(const std::filesystem::path& dir);
};

std::string instantiate(std::string_view tmpl,
                        const std::map<std::string, std::string>& values);

enum class NlMode { Plain, ChainOfThought };

class Compiler {
 public:
  explicit Compiler(TemplateSet templates, int max_iterations = 10);

  const TemplateSet& templates() const { return templates_; }

  // Key-only enumeration of a relation, optionally with one fused condition.
  PromptProgram compile_scan(const RelationDecl& relation,
                             const std::optional<Condition>& fused = std::nullopt) const;

  // "What is the <attribute> of <relation> <key>?"
  Prompt compile_fetch(const RelationDecl& relation, const Cell& key_value,
                       const AttrDecl& attribute) const;

  // "Has <relation> <key> <attribute> <op phrase> <value>?"
  Prompt compile_filter(const RelationDecl& relation, const Cell& key_value,
                        const Condition& condition) const;

  // Whole-query natural language baseline, optionally chain of thought.
  Prompt compile_nl(const std::string& question, NlMode mode) const;

 private:
  TemplateSet templates_;
  int max_iterations_;
};

// Reverse side of the compiler: recognizes which template produced a body
// and extracts the slot values. The mock backend is built on this.
struct MatchedScan {
  std::string relation;
  std::string key_attribute;
  std::optional<std::string> attribute;  // fused condition, when present
  std::optional<sql::CompareOp> op;
  std::optional<std::string> value;
};

struct MatchedFetch {
  std::string relation;
  std::string key;
  std::string attribute;
};

struct MatchedFilter {
  std::string relation;
  std::string key;
  std::string attribute;
  sql::CompareOp op = sql::CompareOp::Eq;
  std::string value;
};

struct MatchedContinue {};

struct MatchedQuestion {
  std::string question;
  NlMode mode = NlMode::Plain;
};

using Match =
    std::variant<MatchedScan, MatchedFetch, MatchedFilter, MatchedContinue, MatchedQuestion>;

class TemplateMatcher {
 public:
  explicit TemplateMatcher(const TemplateSet& templates);

  // Tries, in order: continuation, fused scan, scan, filter, fetch, nl.
  std::optional<Match> match(std::string_view body) const;

 private:
  struct Pattern {
    int kind = 0;
    std::regex regex;
    std::vector<std::string> slots;  // capture group names in order
  };

  std::vector<Pattern> patterns_;
  std::string continue_body_;
};

}  // namespace galois::prompt

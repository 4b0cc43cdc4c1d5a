#include "galois/prompt.hpp"

#include <array>

#include "galois/csv.hpp"
#include "galois/errors.hpp"

namespace galois::prompt {

namespace {

constexpr const char* kScan = "List the {key} of all {relation}.";
constexpr const char* kScanFused = "List the {key} of all {relation} with {attribute} {op} {value}.";
constexpr const char* kScanContinue = "Return more results";
constexpr const char* kFetch = "What is the {attribute} of {relation} {key}?";
constexpr const char* kFilter = "Has {relation} {key} {attribute} {op} {value}?";

constexpr const char* kNlPlain = "Q: {question}\nA:";

constexpr const char* kNlCot =
    "Q: What is the capital of France?\n"
    "A: Let's reason step by step. France is a country in Europe. Its capital and largest "
    "city is Paris. The answer is Paris.\n"
    "\n"
    "Q: {question}\n"
    "A: Let's reason step by step.";

constexpr const char* kPreambleQa =
    "I am a highly intelligent question answering bot. If you ask me a question that is "
    "rooted in truth, I will give you the short answer. If you ask me a question that is "
    "nonsense, trickery, or has no clear answer, I will respond with \"Unknown\". If the "
    "answer is numerical, I will return the number only.\n"
    "\n"
    "Q: What is human life expectancy in the United States?\n"
    "A: 78.\n"
    "\n"
    "Q: Who was president of the United States in 1955?\n"
    "A: Dwight D. Eisenhower.\n"
    "\n"
    "Q: What is the capital of France?\n"
    "A: Paris.\n"
    "\n"
    "Q: Which continent does the country with initial letter O belong to?\n"
    "A: Oceania.\n"
    "\n"
    "Q: Where were the 1992 Olympics held?\n"
    "A: Barcelona.\n"
    "\n"
    "Q: How many squigs are in a bonk?\n"
    "A: Unknown.";

constexpr const char* kPreambleList =
    "I am a highly intelligent question answering bot. If you ask me to list values, I "
    "will answer with a comma-separated list and nothing else. If I do not know any "
    "further values, I will respond with \"Unknown\".";

struct PhraseEntry {
  sql::CompareOp op;
  const char* phrase;
};

constexpr std::array<PhraseEntry, 6> kPhrases = {{
    {sql::CompareOp::Eq, "equal to"},
    {sql::CompareOp::Ne, "different from"},
    {sql::CompareOp::Lt, "less than"},
    {sql::CompareOp::Gt, "greater than"},
    {sql::CompareOp::Le, "at most"},
    {sql::CompareOp::Ge, "at least"},
}};

std::string op_alternation() {
  std::string out;
  for (const auto& entry : kPhrases) {
    if (!out.empty()) out += '|';
    out += entry.phrase;
  }
  return out;
}

std::string render_prompt_value(const Cell& value) {
  if (value.is_null()) throw ExecError("cannot render a null value into a prompt");
  return value.to_text();
}

}  // namespace

const char* operator_phrase(sql::CompareOp op) {
  for (const auto& entry : kPhrases) {
    if (entry.op == op) return entry.phrase;
  }
  return "equal to";
}

std::optional<sql::CompareOp> parse_operator_phrase(std::string_view phrase) {
  for (const auto& entry : kPhrases) {
    if (phrase == entry.phrase) return entry.op;
  }
  return std::nullopt;
}

TemplateSet TemplateSet::default_set() {
  TemplateSet set;
  set.scan = kScan;
  set.scan_fused = kScanFused;
  set.scan_continue = kScanContinue;
  set.fetch = kFetch;
  set.filter = kFilter;
  set.nl_plain = kNlPlain;
  set.nl_cot = kNlCot;
  set.preamble_qa = kPreambleQa;
  set.preamble_list = kPreambleList;
  return set;
}

TemplateSet TemplateSet::load_dir(const std::filesystem::path& dir) {
  TemplateSet set = default_set();
  auto load = [&](const char* name, std::string& slot) {
    std::filesystem::path file = dir / (std::string(name) + ".txt");
    if (!std::filesystem::exists(file)) return;
    std::string text = read_text_file(file.string());
    while (!text.empty() && (text.back() == '\n' || text.back() == '\r')) text.pop_back();
    slot = text;
  };
  load("scan", set.scan);
  load("scan_fused", set.scan_fused);
  load("scan_continue", set.scan_continue);
  load("fetch", set.fetch);
  load("filter", set.filter);
  load("nl_plain", set.nl_plain);
  load("nl_cot", set.nl_cot);
  load("preamble_qa", set.preamble_qa);
  load("preamble_list", set.preamble_list);
  return set;
}

std::string instantiate(std::string_view tmpl,
                        const std::map<std::string, std::string>& values) {
  std::string out;
  out.reserve(tmpl.size());
  for (size_t i = 0; i < tmpl.size(); ++i) {
    if (tmpl[i] != '{') {
      out += tmpl[i];
      continue;
    }
    size_t close = tmpl.find('}', i);
    if (close == std::string_view::npos) {
      throw ValidationError("template has an unclosed placeholder");
    }
    std::string name(tmpl.substr(i + 1, close - i - 1));
    auto value = values.find(name);
    if (value == values.end()) {
      throw ValidationError("template references unknown placeholder {" + name + "}");
    }
    out += value->second;
    i = close;
  }
  return out;
}

Compiler::Compiler(TemplateSet templates, int max_iterations)
    : templates_(std::move(templates)), max_iterations_(max_iterations) {}

PromptProgram Compiler::compile_scan(const RelationDecl& relation,
                                     const std::optional<Condition>& fused) const {
  std::map<std::string, std::string> values = {
      {"key", relation.key},
      {"relation", relation.name},
  };
  PromptProgram program;
  program.stop.max_iterations = max_iterations_;
  program.initial.shape = Shape::ValueList;
  program.initial.preamble = templates_.preamble_list;
  if (fused) {
    values["attribute"] = fused->attribute;
    values["op"] = operator_phrase(fused->op);
    values["value"] = render_prompt_value(fused->value);
    program.initial.body = instantiate(templates_.scan_fused, values);
  } else {
    program.initial.body = instantiate(templates_.scan, values);
  }
  program.continuation.shape = Shape::ValueList;
  program.continuation.preamble = templates_.preamble_list;
  program.continuation.body = templates_.scan_continue;
  return program;
}

Prompt Compiler::compile_fetch(const RelationDecl& relation, const Cell& key_value,
                               const AttrDecl& attribute) const {
  Prompt prompt;
  prompt.shape = Shape::SingleValue;
  prompt.preamble = templates_.preamble_qa;
  prompt.body = instantiate(templates_.fetch, {
                                                  {"attribute", attribute.name},
                                                  {"relation", relation.name},
                                                  {"key", render_prompt_value(key_value)},
                                              });
  return prompt;
}

Prompt Compiler::compile_filter(const RelationDecl& relation, const Cell& key_value,
                                const Condition& condition) const {
  Prompt prompt;
  prompt.shape = Shape::YesNo;
  prompt.preamble = templates_.preamble_qa;
  prompt.body = instantiate(templates_.filter, {
                                                   {"relation", relation.name},
                                                   {"key", render_prompt_value(key_value)},
                                                   {"attribute", condition.attribute},
                                                   {"op", operator_phrase(condition.op)},
                                                   {"value", render_prompt_value(condition.value)},
                                               });
  return prompt;
}

Prompt Compiler::compile_nl(const std::string& question, NlMode mode) const {
  Prompt prompt;
  prompt.shape = Shape::FreeText;
  prompt.preamble = templates_.preamble_qa;
  const std::string& tmpl = mode == NlMode::Plain ? templates_.nl_plain : templates_.nl_cot;
  prompt.body = instantiate(tmpl, {{"question", question}});
  return prompt;
}

namespace {

enum PatternKind {
  kKindScanFused,
  kKindScan,
  kKindFilter,
  kKindFetch,
  kKindNlCot,
  kKindNlPlain,
};

std::string escape_regex(std::string_view text) {
  std::string out;
  for (char c : text) {
    if (std::string_view("\\^$.|?*+()[]{}").find(c) != std::string_view::npos) out += '\\';
    out += c;
  }
  return out;
}

// Slot classes: identifiers for schema names, a phrase alternation for
// operators, and a non-greedy wildcard for free values.
std::string slot_class(const std::string& slot, int kind) {
  if (slot == "relation" || slot == "attribute") return "([A-Za-z_][A-Za-z0-9_]*)";
  if (slot == "op") return "(" + op_alternation() + ")";
  if (slot == "key" && (kind == kKindScan || kind == kKindScanFused)) {
    return "([A-Za-z_][A-Za-z0-9_]*)";  // the key attribute's name, not a value
  }
  if (slot == "question") return "(.+)";
  return "(.+?)";
}

}  // namespace

TemplateMatcher::TemplateMatcher(const TemplateSet& templates) {
  continue_body_ = templates.scan_continue;
  auto add = [&](int kind, const std::string& tmpl) {
    Pattern pattern;
    pattern.kind = kind;
    std::string regex_text = "^";
    for (size_t i = 0; i < tmpl.size(); ++i) {
      if (tmpl[i] != '{') {
        regex_text += escape_regex(std::string_view(&tmpl[i], 1));
        continue;
      }
      size_t close = tmpl.find('}', i);
      if (close == std::string::npos) throw ValidationError("template has an unclosed placeholder");
      std::string slot = tmpl.substr(i + 1, close - i - 1);
      regex_text += slot_class(slot, kind);
      pattern.slots.push_back(slot);
      i = close;
    }
    regex_text += "$";
    pattern.regex = std::regex(regex_text);
    patterns_.push_back(std::move(pattern));
  };
  add(kKindScanFused, templates.scan_fused);
  add(kKindScan, templates.scan);
  add(kKindFilter, templates.filter);
  add(kKindFetch, templates.fetch);
  add(kKindNlCot, templates.nl_cot);
  add(kKindNlPlain, templates.nl_plain);
}

std::optional<Match> TemplateMatcher::match(std::string_view body) const {
  if (body == continue_body_) return Match(MatchedContinue{});
  std::string text(body);
  for (const auto& pattern : patterns_) {
    std::smatch groups;
    if (!std::regex_match(text, groups, pattern.regex)) continue;
    std::map<std::string, std::string> slots;
    for (size_t i = 0; i < pattern.slots.size(); ++i) {
      slots[pattern.slots[i]] = groups[i + 1].str();
    }
    switch (pattern.kind) {
      case kKindScanFused: {
        MatchedScan m;
        m.relation = slots["relation"];
        m.key_attribute = slots["key"];
        m.attribute = slots["attribute"];
        m.op = parse_operator_phrase(slots["op"]);
        if (!m.op) continue;
        m.value = slots["value"];
        return Match(std::move(m));
      }
      case kKindScan: {
        MatchedScan m;
        m.relation = slots["relation"];
        m.key_attribute = slots["key"];
        return Match(std::move(m));
      }
      case kKindFilter: {
        MatchedFilter m;
        m.relation = slots["relation"];
        m.key = slots["key"];
        m.attribute = slots["attribute"];
        auto op = parse_operator_phrase(slots["op"]);
        if (!op) continue;
        m.op = *op;
        m.value = slots["value"];
        return Match(std::move(m));
      }
      case kKindFetch: {
        MatchedFetch m;
        m.relation = slots["relation"];
        m.key = slots["key"];
        m.attribute = slots["attribute"];
        return Match(std::move(m));
      }
      case kKindNlCot: {
        MatchedQuestion m;
        m.question = slots["question"];
        m.mode = NlMode::ChainOfThought;
        return Match(std::move(m));
      }
      case kKindNlPlain: {
        MatchedQuestion m;
        m.question = slots["question"];
        m.mode = NlMode::Plain;
        return Match(std::move(m));
      }
    }
  }
  return std::nullopt;
}

}  // namespace galois::prompt

#include "galois/mock_backend.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <optional>
#include <set>

#include "galois/errors.hpp"

namespace galois::backend {

namespace {

constexpr const char* kUnknown = "Unknown";

std::optional<double> plain_number(const std::string& text) {
  if (text.empty()) return std::nullopt;
  double value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) return std::nullopt;
  return value;
}

// "3,000" for the separator variant.
std::string with_separators(std::int64_t value) {
  std::string digits = std::to_string(value < 0 ? -value : value);
  std::string out;
  for (std::size_t i = 0; i < digits.size(); ++i) {
    if (i && (digits.size() - i) % 3 == 0) out += ',';
    out += digits[i];
  }
  return value < 0 ? "-" + out : out;
}

}  // namespace

bool mock_condition_holds(const std::string& stored, sql::CompareOp op,
                          const std::string& literal) {
  int cmp;
  auto a = plain_number(stored);
  auto b = plain_number(literal);
  if (a && b) {
    cmp = *a < *b ? -1 : (*a > *b ? 1 : 0);
  } else {
    int raw = stored.compare(literal);
    cmp = raw < 0 ? -1 : (raw > 0 ? 1 : 0);
  }
  switch (op) {
    case sql::CompareOp::Eq: return cmp == 0;
    case sql::CompareOp::Ne: return cmp != 0;
    case sql::CompareOp::Lt: return cmp < 0;
    case sql::CompareOp::Le: return cmp <= 0;
    case sql::CompareOp::Gt: return cmp > 0;
    case sql::CompareOp::Ge: return cmp >= 0;
  }
  return false;
}

MockBackend::MockBackend(FactStore store, NoiseConfig noise, prompt::TemplateSet templates)
    : store_(std::move(store)), noise_(std::move(noise)), matcher_(templates) {}

std::string MockBackend::complete(const CompletionRequest& request) {
  count(request);
  auto matched = matcher_.match(request.prompt.body);
  if (!matched) {
    throw BackendError("mock backend cannot recognize prompt: " + request.prompt.body);
  }
  if (std::holds_alternative<prompt::MatchedContinue>(*matched)) {
    if (request.conversation.empty()) {
      throw BackendError("mock backend got a continuation without a conversation");
    }
    auto first = matcher_.match(request.conversation.front().prompt_body);
    if (!first || !std::holds_alternative<prompt::MatchedScan>(*first)) {
      throw BackendError("mock backend got a continuation that does not follow a scan");
    }
    return answer_scan(std::get<prompt::MatchedScan>(*first), request.conversation.size());
  }
  if (const auto* scan = std::get_if<prompt::MatchedScan>(&*matched)) {
    return answer_scan(*scan, 0);
  }
  if (const auto* fetch = std::get_if<prompt::MatchedFetch>(&*matched)) {
    return answer_fetch(*fetch);
  }
  if (const auto* filter = std::get_if<prompt::MatchedFilter>(&*matched)) {
    return answer_filter(*filter);
  }
  return answer_question(std::get<prompt::MatchedQuestion>(*matched));
}

bool MockBackend::dropped(const std::string& relation, const std::string& key) const {
  if (noise_.drop_rate <= 0) return false;
  return hash_to_unit(noise_hash(noise_.seed, {"drop", relation, key})) < noise_.drop_rate;
}

std::string MockBackend::answer_scan(const prompt::MatchedScan& scan, std::size_t page) const {
  auto listed = store_.keys.find(scan.relation);
  if (listed == store_.keys.end()) return kUnknown;

  std::vector<std::string> survivors;
  for (const std::string& key : listed->second) {
    if (dropped(scan.relation, key)) continue;
    if (scan.attribute) {
      const std::string* stored = store_.cell(scan.relation, key, *scan.attribute);
      if (!stored || !mock_condition_holds(*stored, *scan.op, *scan.value)) continue;
    }
    std::string rendered = key;
    auto alias = noise_.alias.find(rendered);
    if (alias != noise_.alias.end()) rendered = alias->second;
    survivors.push_back(std::move(rendered));
  }

  std::size_t size = static_cast<std::size_t>(store_.page_size);
  std::size_t begin = page * size;
  if (begin >= survivors.size()) return kUnknown;
  std::size_t end = std::min(begin + size, survivors.size());
  std::string out;
  for (std::size_t i = begin; i < end; ++i) {
    if (i > begin) out += ", ";
    out += survivors[i];
  }
  return out;
}

std::string MockBackend::apply_value_noise(std::string value, const std::string& relation,
                                           const std::string& key,
                                           const std::string& attribute) const {
  if (noise_.hallucination_rate > 0 &&
      hash_to_unit(noise_hash(noise_.seed, {"halluc", relation, key, attribute})) <
          noise_.hallucination_rate) {
    // Replace with another value this attribute takes elsewhere, so the
    // wrong answer still looks plausible.
    std::set<std::string> pool_set;
    auto listed = store_.keys.find(relation);
    if (listed != store_.keys.end()) {
      for (const std::string& other : listed->second) {
        const std::string* stored = store_.cell(relation, other, attribute);
        if (stored && *stored != value) pool_set.insert(*stored);
      }
    }
    if (!pool_set.empty()) {
      std::vector<std::string> pool(pool_set.begin(), pool_set.end());
      std::uint64_t pick = noise_hash(noise_.seed, {"pick", relation, key, attribute});
      value = pool[pick % pool.size()];
    }
  }

  auto alias = noise_.alias.find(value);
  if (alias != noise_.alias.end()) value = alias->second;

  if (noise_.format_noise) {
    auto number = plain_number(value);
    if (number) {
      double v = *number;
      std::uint64_t variant = noise_hash(noise_.seed, {"fmt", relation, key, attribute}) % 3;
      bool integral = v == std::floor(v) && std::abs(v) < 9.2e18;
      if (variant == 0 && integral) {
        auto iv = static_cast<std::int64_t>(v);
        if (iv != 0 && iv % 1000 == 0) {
          if (iv % 1000000000 == 0) return std::to_string(iv / 1000000000) + "B";
          if (iv % 1000000 == 0) return std::to_string(iv / 1000000) + "M";
          return std::to_string(iv / 1000) + "k";
        }
        variant = 1;
      } else if (variant == 0) {
        variant = 1;
      }
      if (variant == 1 && integral && std::abs(v) >= 1000) {
        return with_separators(static_cast<std::int64_t>(v));
      }
      return "approx " + value;
    }
  }
  return value;
}

std::string MockBackend::answer_fetch(const prompt::MatchedFetch& fetch) const {
  const std::string* stored = store_.cell(fetch.relation, fetch.key, fetch.attribute);
  if (!stored) return kUnknown;
  return apply_value_noise(*stored, fetch.relation, fetch.key, fetch.attribute);
}

std::string MockBackend::answer_filter(const prompt::MatchedFilter& filter) const {
  const std::string* stored = store_.cell(filter.relation, filter.key, filter.attribute);
  if (!stored) return kUnknown;
  return mock_condition_holds(*stored, filter.op, filter.value) ? "Yes" : "No";
}

std::string MockBackend::answer_question(const prompt::MatchedQuestion& question) const {
  auto answer = store_.qa.find(question.question);
  if (answer == store_.qa.end()) return kUnknown;
  return answer->second;
}

}  // namespace galois::backend

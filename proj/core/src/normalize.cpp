#include "galois/normalize.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <regex>

namespace galois::norm {

namespace {

std::string to_lower(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

constexpr std::array<std::string_view, 7> kRefusals = {
    "unknown", "n/a", "na", "none", "null", "no answer", "i don't know",
};

constexpr std::array<std::string_view, 3> kAnswerPrefixes = {
    "the answer is", "answer:", "a:",
};

constexpr std::array<std::string_view, 6> kHedgeWords = {
    "approximately", "approx.", "approx", "about", "roughly", "around",
};

bool strip_prefix_ci(std::string_view& text, std::string_view prefix) {
  if (text.size() < prefix.size()) return false;
  for (size_t i = 0; i < prefix.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(text[i])) !=
        std::tolower(static_cast<unsigned char>(prefix[i]))) {
      return false;
    }
  }
  // A prefix word must end at a boundary so "Aboutness" survives.
  if (text.size() > prefix.size()) {
    char next = text[prefix.size()];
    char last = prefix.back();
    if (std::isalnum(static_cast<unsigned char>(next)) && last != ':') return false;
  }
  text.remove_prefix(prefix.size());
  text = trim_view(text);
  return true;
}

// Shared head of every normalization: trim, unquote, drop answer prefixes,
// drop trailing sentence marks. Runs to a fixed point so the output is
// stable under renormalization; every step strictly shrinks the text.
std::string_view strip_shell(std::string_view text) {
  text = trim_view(text);
  bool changed = true;
  while (changed) {
    changed = false;
    if (text.size() >= 2 &&
        ((text.front() == '"' && text.back() == '"') ||
         (text.front() == '\'' && text.back() == '\''))) {
      text = trim_view(text.substr(1, text.size() - 2));
      changed = true;
    }
    for (auto prefix : kAnswerPrefixes) {
      if (strip_prefix_ci(text, prefix)) changed = true;
    }
    if (!text.empty() && (text.back() == '.' || text.back() == '!' || text.back() == '?')) {
      text = trim_view(text.substr(0, text.size() - 1));
      changed = true;
    }
  }
  return text;
}

struct NumberParse {
  double value = 0;
  bool ok = false;
};

double magnitude_word(std::string_view word) {
  std::string w = to_lower(word);
  if (w == "thousand") return 1e3;
  if (w == "million") return 1e6;
  if (w == "billion") return 1e9;
  if (w == "trillion") return 1e12;
  return 0;
}

bool all_alpha(std::string_view word) {
  return !word.empty() && std::all_of(word.begin(), word.end(), [](unsigned char c) {
    return std::isalpha(c) != 0;
  });
}

std::vector<std::string_view> split_words(std::string_view text) {
  std::vector<std::string_view> words;
  size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    size_t start = i;
    while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (i > start) words.push_back(text.substr(start, i - start));
  }
  return words;
}

NumberParse parse_number(std::string_view text) {
  auto words = split_words(text);
  size_t next = 1;
  for (size_t guard = 0; guard < 2 && !words.empty(); ++guard) {
    bool hedged = false;
    for (auto hedge : kHedgeWords) {
      if (to_lower(words[0]) == hedge) {
        words.erase(words.begin());
        hedged = true;
        break;
      }
    }
    if (!hedged) break;
  }
  if (words.empty()) return {};

  std::string head(words[0]);
  double multiplier = 1;

  if (!head.empty() && head.back() == '%') head.pop_back();
  if (head.size() >= 2) {
    char suffix = head.back();
    char before = head[head.size() - 2];
    if (std::isdigit(static_cast<unsigned char>(before))) {
      if (suffix == 'k' || suffix == 'K') {
        multiplier = 1e3;
        head.pop_back();
      } else if (suffix == 'M') {
        multiplier = 1e6;
      } else if (suffix == 'B') {
        multiplier = 1e9;
      }
      if (multiplier != 1 && (suffix == 'M' || suffix == 'B')) head.pop_back();
    }
  }
  head.erase(std::remove(head.begin(), head.end(), ','), head.end());
  if (head.empty()) return {};

  double value = 0;
  const char* begin = head.data();
  const char* end = head.data() + head.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) return {};

  if (next < words.size()) {
    double word_multiplier = magnitude_word(words[next]);
    if (word_multiplier > 0) {
      if (multiplier != 1) return {};  // "1k million" is noise, not a number
      multiplier = word_multiplier;
      ++next;
    }
  }
  for (; next < words.size(); ++next) {
    std::string_view word = words[next];
    if (word == "%") continue;
    if (!all_alpha(word)) return {};  // trailing garbage other than unit words
  }
  return {value * multiplier, true};
}

}  // namespace

bool is_refusal(std::string_view raw) {
  std::string folded = to_lower(trim_view(raw));
  if (folded.empty()) return true;
  if (!folded.empty() && (folded.back() == '.' || folded.back() == '!')) {
    folded.pop_back();
  }
  for (auto refusal : kRefusals) {
    if (folded == refusal) return true;
  }
  if (folded == "i do not know") return true;
  return false;
}

Cell normalize_value(std::string_view raw, ValueType target) {
  std::string_view text = strip_shell(raw);
  if (is_refusal(text)) return Cell::null();

  switch (target) {
    case ValueType::Text:
      return Cell::text(std::string(text));
    case ValueType::Bool:
      switch (parse_boolean_answer(text)) {
        case BoolAnswer::Yes: return Cell::boolean(true);
        case BoolAnswer::No: return Cell::boolean(false);
        case BoolAnswer::Unknown: return Cell::null();
      }
      return Cell::null();
    case ValueType::Int: {
      auto parsed = parse_number(text);
      if (!parsed.ok) return Cell::null();
      double v = parsed.value;
      if (v != std::floor(v)) return Cell::null();
      if (v < -9.2e18 || v > 9.2e18) return Cell::null();
      return Cell::integer(static_cast<std::int64_t>(v));
    }
    case ValueType::Float: {
      auto parsed = parse_number(text);
      if (!parsed.ok) return Cell::null();
      return Cell::real(parsed.value);
    }
  }
  return Cell::null();
}

std::vector<std::string> parse_list_answer(std::string_view raw) {
  std::vector<std::string> items;
  std::string current;
  auto flush = [&] {
    std::string_view item = trim_view(current);
    // Enumeration prefixes: "1.", "23)", "-", "*".
    static const std::regex enumeration(R"(^(\d+[.)]|[-*])\s+)");
    std::string text(item);
    std::smatch m;
    if (std::regex_search(text, m, enumeration)) text = text.substr(m[0].length());
    std::string_view view = trim_view(text);
    if (view.size() > 4 && to_lower(view.substr(0, 4)) == "and ") view = trim_view(view.substr(4));
    if (!view.empty() && (view.back() == '.' || view.back() == '!' || view.back() == '?')) {
      view = trim_view(view.substr(0, view.size() - 1));
    }
    std::string value(view);
    if (!value.empty() && !is_refusal(value)) {
      if (std::find(items.begin(), items.end(), value) == items.end()) {
        items.push_back(std::move(value));
      }
    }
    current.clear();
  };
  for (char c : raw) {
    if (c == '\n' || c == ',' || c == ';') {
      flush();
    } else {
      current += c;
    }
  }
  flush();
  return items;
}

BoolAnswer parse_boolean_answer(std::string_view raw) {
  std::string_view text = strip_shell(raw);
  if (is_refusal(text)) return BoolAnswer::Unknown;
  bool saw_yes = false;
  bool saw_no = false;
  std::string word;
  auto classify = [&] {
    if (word.empty()) return;
    if (word == "yes" || word == "true" || word == "correct" || word == "indeed" ||
        word == "affirmative") {
      saw_yes = true;
    } else if (word == "no" || word == "false" || word == "incorrect" ||
               word == "negative" || word == "not") {
      saw_no = true;
    }
    word.clear();
  };
  for (char c : text) {
    if (std::isalpha(static_cast<unsigned char>(c))) {
      word += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    } else {
      classify();
    }
  }
  classify();
  if (saw_yes == saw_no) return BoolAnswer::Unknown;
  return saw_yes ? BoolAnswer::Yes : BoolAnswer::No;
}

Cell enforce_domain(const Cell& cell, const AttrDecl& attr, const RejectionSink& on_reject) {
  if (cell.is_null() || !attr.domain) return cell;
  bool admissible = true;
  if (const auto* range = std::get_if<RangeDomain>(&*attr.domain)) {
    if (!cell.is_numeric()) {
      admissible = false;
    } else {
      double v = cell.as_double();
      if (range->low && v < *range->low) admissible = false;
      if (range->high && v > *range->high) admissible = false;
    }
  } else if (const auto* en = std::get_if<EnumDomain>(&*attr.domain)) {
    std::string rendered = cell.to_text();
    admissible = std::find(en->values.begin(), en->values.end(), rendered) != en->values.end();
  } else {
    const auto& pattern = std::get<PatternDomain>(*attr.domain);
    admissible = std::regex_match(cell.to_text(), std::regex(pattern.pattern));
  }
  if (admissible) return cell;
  if (on_reject) on_reject({attr.name, cell.to_text(), describe(*attr.domain)});
  return Cell::null();
}

}  // namespace galois::norm

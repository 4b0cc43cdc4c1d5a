#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "galois/catalog.hpp"
#include "galois/cell.hpp"

namespace galois::norm {

// Coerces one raw model answer into a typed cell. Deterministic and
// idempotent over its own canonical renderings: for any cell c produced
// here, normalize_value(c.to_text(), t) == c.
//
// Shared steps: trim, strip one pair of surrounding quotes, strip answer
// prefixes ("The answer is", "Answer:", "A:"), strip one trailing
// sentence mark (. ! ?), then map refusals ("Unknown", "N/A", "none",
// "no answer", ...) and empty text to Null.
//
// Numeric targets additionally drop hedge words ("approx", "about", ...),
// thousands separators, a trailing percent sign (the number is kept as
// written), magnitude suffixes (k, M, B) and words ("thousand", "million",
// "billion", "trillion"), and trailing unit words ("years", "people").
// An int target rejects fractional results ("1.5" becomes Null, never 1),
// while "1.5k" is accepted as 1500.
Cell normalize_value(std::string_view raw, ValueType target);

// Splits a scan answer into items: newlines first, then semicolons and
// commas, with enumeration prefixes ("1.", "2)", "-", "*") and a leading
// "and" removed per item. Items are trimmed, stripped of one trailing
// sentence mark, deduplicated case-sensitively keeping first occurrence.
// Refusal items are dropped.
std::vector<std::string> parse_list_answer(std::string_view raw);

enum class BoolAnswer { Yes, No, Unknown };

// Word-based match, so "Notably, no" reads as No while "Notably" alone
// does not. Both polarities present, neither present, or a refusal give
// Unknown.
BoolAnswer parse_boolean_answer(std::string_view raw);

// True when the trimmed answer is empty or one of the refusal forms.
bool is_refusal(std::string_view raw);

struct RejectionRecord {
  std::string attribute;
  std::string value;       // canonical rendering of the rejected cell
  std::string constraint;  // describe(domain) of the violated domain
};

using RejectionSink = std::function<void(const RejectionRecord&)>;

// Applies the attribute's domain, if any. Violations become Null and are
// reported through on_reject. Null input passes through unreported.
Cell enforce_domain(const Cell& cell, const AttrDecl& attr,
                    const RejectionSink& on_reject = {});

}  // namespace galois::norm

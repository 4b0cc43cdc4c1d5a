#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

namespace galois {

enum class ValueType { Text, Int, Float, Bool };

const char* to_string(ValueType type);
std::optional<ValueType> parse_value_type(std::string_view name);

// The engine's value currency: one typed scalar or Null.
// Text is stored trimmed and never empty (empty collapses to Null).
// Floats are always finite; non-finite input collapses to Null.
class Cell {
 public:
  Cell() = default;

  static Cell null() { return Cell(); }
  static Cell text(std::string value);
  static Cell integer(std::int64_t value);
  static Cell real(double value);
  static Cell boolean(bool value);

  bool is_null() const { return std::holds_alternative<std::monostate>(value_); }
  bool is_text() const { return std::holds_alternative<std::string>(value_); }
  bool is_int() const { return std::holds_alternative<std::int64_t>(value_); }
  bool is_float() const { return std::holds_alternative<double>(value_); }
  bool is_bool() const { return std::holds_alternative<bool>(value_); }
  bool is_numeric() const { return is_int() || is_float(); }

  const std::string& as_text() const { return std::get<std::string>(value_); }
  std::int64_t as_int() const { return std::get<std::int64_t>(value_); }
  double as_float() const { return std::get<double>(value_); }
  bool as_bool() const { return std::get<bool>(value_); }

  // Int or Float widened to double. Undefined for other kinds.
  double as_double() const;

  // Type of the stored value; nullopt for Null.
  std::optional<ValueType> type() const;

  // Canonical text rendering used in prompts and serialized results.
  // Null renders as the empty string. Integral floats render without
  // a fraction part; other floats use the shortest round-trip form.
  std::string to_text() const;

  // Int and Float compare numerically; Null equals Null. Used for grouping
  // and deduplication. Predicate evaluation treats Null separately.
  bool operator==(const Cell& other) const;
  bool operator!=(const Cell& other) const { return !(*this == other); }

 private:
  std::variant<std::monostate, std::string, std::int64_t, double, bool> value_;
};

// Total order used by sorting: Null first, then Bool, numerics, Text.
// Int and Float order numerically within the numeric band.
// Returns negative, zero, or positive.
int compare_cells(const Cell& a, const Cell& b);

// Shortest decimal form that parses back to the same double.
// Integral magnitudes below 1e15 render as plain integers.
std::string render_double(double value);

// Whitespace helpers shared across parsing code.
std::string_view trim_view(std::string_view text);
std::string trim_copy(std::string_view text);

}  // namespace galois

#include "galois/cell.hpp"

#include <cctype>
#include <charconv>
#include <cmath>

namespace galois {

const char* to_string(ValueType type) {
  switch (type) {
    case ValueType::Text: return "text";
    case ValueType::Int: return "int";
    case ValueType::Float: return "float";
    case ValueType::Bool: return "bool";
  }
  return "text";
}

std::optional<ValueType> parse_value_type(std::string_view name) {
  if (name == "text") return ValueType::Text;
  if (name == "int") return ValueType::Int;
  if (name == "float") return ValueType::Float;
  if (name == "bool") return ValueType::Bool;
  return std::nullopt;
}

std::string_view trim_view(std::string_view text) {
  size_t begin = 0;
  size_t end = text.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(text[begin]))) ++begin;
  while (end > begin && std::isspace(static_cast<unsigned char>(text[end - 1]))) --end;
  return text.substr(begin, end - begin);
}

std::string trim_copy(std::string_view text) { return std::string(trim_view(text)); }

Cell Cell::text(std::string value) {
  std::string trimmed = trim_copy(value);
  if (trimmed.empty()) return Cell();
  Cell c;
  c.value_ = std::move(trimmed);
  return c;
}

Cell Cell::integer(std::int64_t value) {
  Cell c;
  c.value_ = value;
  return c;
}

Cell Cell::real(double value) {
  if (!std::isfinite(value)) return Cell();
  Cell c;
  c.value_ = value;
  return c;
}

Cell Cell::boolean(bool value) {
  Cell c;
  c.value_ = value;
  return c;
}

double Cell::as_double() const {
  if (is_int()) return static_cast<double>(as_int());
  return as_float();
}

std::optional<ValueType> Cell::type() const {
  if (is_text()) return ValueType::Text;
  if (is_int()) return ValueType::Int;
  if (is_float()) return ValueType::Float;
  if (is_bool()) return ValueType::Bool;
  return std::nullopt;
}

std::string Cell::to_text() const {
  if (is_null()) return "";
  if (is_text()) return as_text();
  if (is_int()) return std::to_string(as_int());
  if (is_float()) return render_double(as_float());
  return as_bool() ? "true" : "false";
}

bool Cell::operator==(const Cell& other) const {
  if (is_null() || other.is_null()) return is_null() && other.is_null();
  if (is_numeric() && other.is_numeric()) {
    if (is_int() && other.is_int()) return as_int() == other.as_int();
    return as_double() == other.as_double();
  }
  return value_ == other.value_;
}

namespace {

// Rank used only when kinds differ and neither pair is numeric/numeric.
int kind_rank(const Cell& c) {
  if (c.is_null()) return 0;
  if (c.is_bool()) return 1;
  if (c.is_numeric()) return 2;
  return 3;
}

template <typename T>
int three_way(const T& a, const T& b) {
  if (a < b) return -1;
  if (b < a) return 1;
  return 0;
}

}  // namespace

int compare_cells(const Cell& a, const Cell& b) {
  int ra = kind_rank(a);
  int rb = kind_rank(b);
  if (ra != rb) return ra < rb ? -1 : 1;
  switch (ra) {
    case 0:
      return 0;
    case 1:
      return three_way(a.as_bool(), b.as_bool());
    case 2:
      if (a.is_int() && b.is_int()) return three_way(a.as_int(), b.as_int());
      return three_way(a.as_double(), b.as_double());
    default:
      return a.as_text().compare(b.as_text()) < 0   ? -1
             : b.as_text().compare(a.as_text()) < 0 ? 1
                                                    : 0;
  }
}

std::string render_double(double value) {
  if (value == std::floor(value) && std::abs(value) < 1e15) {
    return std::to_string(static_cast<std::int64_t>(value));
  }
  char buffer[64];
  auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, result.ptr);
}

}  // namespace galois

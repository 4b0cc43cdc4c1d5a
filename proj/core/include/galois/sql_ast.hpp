#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "galois/cell.hpp"

namespace galois::sql {

enum class CompareOp { Eq, Ne, Lt, Le, Gt, Ge };

const char* to_symbol(CompareOp op);  // "=", "!=", "<", "<=", ">", ">="

// Column reference, optionally qualified by a table name or alias.
struct ColumnRef {
  std::optional<std::string> qualifier;
  std::string name;

  std::string display() const {
    return qualifier ? *qualifier + "." + name : name;
  }

  bool operator==(const ColumnRef&) const = default;
};

enum class AggFn { Count, Sum, Avg, Min, Max };

const char* to_string(AggFn fn);  // "COUNT", ...

// One item of the select list. star marks both the bare "*" expansion and
// COUNT(*); a column is present otherwise.
struct SelectItem {
  std::optional<AggFn> agg;
  bool star = false;
  std::optional<ColumnRef> column;
  std::optional<std::string> alias;

  bool operator==(const SelectItem&) const = default;
};

struct FromItem {
  std::string relation;
  std::optional<std::string> alias;

  std::string effective_name() const { return alias ? *alias : relation; }

  bool operator==(const FromItem&) const = default;
};

// column op literal or column op column. The WHERE clause is a conjunction
// of these; OR and nesting are out of the dialect.
struct Predicate {
  ColumnRef lhs;
  CompareOp op;
  std::variant<Cell, ColumnRef> rhs;

  bool rhs_is_column() const { return std::holds_alternative<ColumnRef>(rhs); }

  bool operator==(const Predicate&) const = default;
};

struct OrderItem {
  ColumnRef column;
  bool descending = false;

  bool operator==(const OrderItem&) const = default;
};

struct QueryAst {
  bool distinct = false;
  std::vector<SelectItem> items;
  std::vector<FromItem> from;
  std::vector<Predicate> where;
  std::vector<ColumnRef> group_by;
  std::vector<OrderItem> order_by;
  std::optional<std::int64_t> limit;

  bool operator==(const QueryAst&) const = default;
};

// Parses one SELECT statement. Throws ParseError on malformed text and
// UnsupportedError on recognized constructs outside the dialect (OR, LIKE,
// IN, BETWEEN, HAVING, UNION, explicit JOIN, subqueries, arithmetic).
QueryAst parse(std::string_view text);

// Canonical rendering: uppercase keywords, single spaces, DESC spelled out
// and ASC implied. parse(render(ast)) == ast for every parser output.
std::string render(const QueryAst& ast);

}  // namespace galois::sql

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "galois/catalog.hpp"
#include "galois/relation.hpp"
#include "galois/sql_ast.hpp"

namespace galois::sql {

// A column resolved to a concrete table slot and attribute.
struct BoundColumn {
  std::size_t table = 0;  // index into BoundQuery::tables
  std::string attribute;
  ValueType type = ValueType::Text;
  std::string table_name;  // effective (aliased) name, used for display

  std::string qualified() const { return table_name + "." + attribute; }

  bool operator==(const BoundColumn&) const = default;
};

struct BoundPredicate {
  BoundColumn lhs;
  CompareOp op = CompareOp::Eq;
  std::variant<Cell, BoundColumn> rhs;

  bool rhs_is_column() const { return std::holds_alternative<BoundColumn>(rhs); }
  const BoundColumn& rhs_column() const { return std::get<BoundColumn>(rhs); }
  const Cell& rhs_literal() const { return std::get<Cell>(rhs); }

  // Equality between columns of two different tables.
  bool is_join() const {
    return rhs_is_column() && rhs_column().table != lhs.table;
  }

  std::string display() const;

  bool operator==(const BoundPredicate&) const = default;
};

struct BoundSelectItem {
  std::optional<AggFn> agg;
  bool star_count = false;  // COUNT(*)
  std::optional<BoundColumn> column;
  std::string output_name;
  ValueType output_type = ValueType::Text;

  bool operator==(const BoundSelectItem&) const = default;
};

// ORDER BY resolves either to a projected output column or, for plain
// select queries, to a source column sorted below the projection.
struct BoundOrderItem {
  std::optional<std::size_t> output_index;
  std::optional<BoundColumn> column;
  bool descending = false;

  bool operator==(const BoundOrderItem&) const = default;
};

struct BoundTable {
  std::string effective_name;
  const RelationDecl* decl = nullptr;
};

struct BoundQuery {
  const Catalog* catalog = nullptr;
  QueryAst ast;
  std::vector<BoundTable> tables;
  std::vector<BoundSelectItem> items;  // stars expanded
  std::vector<BoundPredicate> predicates;
  std::vector<BoundColumn> group_by;
  std::vector<BoundOrderItem> order_by;
  bool distinct = false;
  std::optional<std::int64_t> limit;

  bool has_aggregates() const;

  // Output schema shared by the executor and the local reference evaluator.
  std::vector<Column> output_columns() const;
};

// Resolves every reference against the catalog and type-checks predicates.
// Aggregate queries may project ungrouped columns; they evaluate to the
// first value of each group in input order. Throws BindError.
BoundQuery bind(const QueryAst& ast, const Catalog& catalog);

}  // namespace galois::sql

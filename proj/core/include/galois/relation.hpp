#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "galois/cell.hpp"

namespace galois {

struct Column {
  std::string name;
  ValueType type = ValueType::Text;

  bool operator==(const Column& other) const = default;
};

// A materialized table. Rows always have one cell per column.
struct Relation {
  std::vector<Column> columns;
  std::vector<std::vector<Cell>> rows;

  // Exact equality including row order; same_rows ignores order instead.
  bool operator==(const Relation&) const = default;

  static Relation with_columns(std::vector<Column> columns);

  std::optional<std::size_t> find_column(std::string_view name) const;

  // Throws ExecError when the column is absent.
  std::size_t column_index(std::string_view name) const;

  void append_row(std::vector<Cell> row);
};

// Header plus one line per row; Null becomes an empty field.
std::string to_csv(const Relation& relation);

// {"columns": [{"name", "type"}...], "rows": [[...]...]} with Null as null.
// Key order and number rendering are stable across runs.
std::string to_json(const Relation& relation);

// Multiset equality over rows after canonical sorting; column names ignored,
// cells compared with Cell equality. Used by tests and the evaluation harness.
bool same_rows(const Relation& a, const Relation& b);

}  // namespace galois

#include "galois/relation.hpp"

#include <algorithm>

#include <json.hpp>

#include "galois/csv.hpp"
#include "galois/errors.hpp"

namespace galois {

Relation Relation::with_columns(std::vector<Column> columns) {
  Relation r;
  r.columns = std::move(columns);
  return r;
}

std::optional<std::size_t> Relation::find_column(std::string_view name) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i].name == name) return i;
  }
  return std::nullopt;
}

std::size_t Relation::column_index(std::string_view name) const {
  auto index = find_column(name);
  if (!index) throw ExecError("no such column: " + std::string(name));
  return *index;
}

void Relation::append_row(std::vector<Cell> row) {
  if (row.size() != columns.size()) throw ExecError("row arity mismatch");
  rows.push_back(std::move(row));
}

std::string to_csv(const Relation& relation) {
  std::string out;
  for (std::size_t i = 0; i < relation.columns.size(); ++i) {
    if (i) out += ',';
    out += csv_escape(relation.columns[i].name);
  }
  out += '\n';
  for (const auto& row : relation.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += csv_escape(row[i].to_text());
    }
    out += '\n';
  }
  return out;
}

std::string to_json(const Relation& relation) {
  nlohmann::ordered_json doc;
  doc["columns"] = nlohmann::ordered_json::array();
  for (const auto& column : relation.columns) {
    nlohmann::ordered_json c;
    c["name"] = column.name;
    c["type"] = to_string(column.type);
    doc["columns"].push_back(std::move(c));
  }
  doc["rows"] = nlohmann::ordered_json::array();
  for (const auto& row : relation.rows) {
    nlohmann::ordered_json r = nlohmann::ordered_json::array();
    for (const auto& cell : row) {
      if (cell.is_null()) {
        r.push_back(nullptr);
      } else if (cell.is_int()) {
        r.push_back(cell.as_int());
      } else if (cell.is_float()) {
        r.push_back(cell.as_float());
      } else if (cell.is_bool()) {
        r.push_back(cell.as_bool());
      } else {
        r.push_back(cell.as_text());
      }
    }
    doc["rows"].push_back(std::move(r));
  }
  return doc.dump(2) + "\n";
}

namespace {

bool row_less(const std::vector<Cell>& a, const std::vector<Cell>& b) {
  for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) {
    int c = compare_cells(a[i], b[i]);
    if (c != 0) return c < 0;
  }
  return a.size() < b.size();
}

}  // namespace

bool same_rows(const Relation& a, const Relation& b) {
  if (a.columns.size() != b.columns.size()) return false;
  if (a.rows.size() != b.rows.size()) return false;
  auto sa = a.rows;
  auto sb = b.rows;
  std::sort(sa.begin(), sa.end(), row_less);
  std::sort(sb.begin(), sb.end(), row_less);
  for (std::size_t r = 0; r < sa.size(); ++r) {
    for (std::size_t c = 0; c < sa[r].size(); ++c) {
      if (sa[r][c] != sb[r][c]) return false;
    }
  }
  return true;
}

}  // namespace galois

#include "galois/harness.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numeric>

#include <json.hpp>

#include "galois/csv.hpp"
#include "galois/errors.hpp"

namespace galois::harness {

namespace {

using nlohmann::ordered_json;

// Parses fixture strings the way the CSV loader does: strictly, so a value
// that needs the answer normalizer signals a dirty fixture instead of
// silently round-tripping through it.
Cell strict_cell(const std::string& raw, ValueType type, const std::string& where) {
  std::string text = trim_copy(raw);
  if (text.empty()) return Cell::null();
  switch (type) {
    case ValueType::Text:
      return Cell::text(text);
    case ValueType::Int: {
      std::int64_t value = 0;
      auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
      if (ec != std::errc() || ptr != text.data() + text.size()) {
        throw ValidationError(where + ": cannot parse '" + text + "' as int");
      }
      return Cell::integer(value);
    }
    case ValueType::Float: {
      double value = 0;
      auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
      if (ec != std::errc() || ptr != text.data() + text.size()) {
        throw ValidationError(where + ": cannot parse '" + text + "' as float");
      }
      return Cell::real(value);
    }
    case ValueType::Bool:
      if (text == "true") return Cell::boolean(true);
      if (text == "false") return Cell::boolean(false);
      throw ValidationError(where + ": cannot parse '" + text + "' as bool");
  }
  return Cell::null();
}

std::string casefold(std::string text) {
  std::transform(text.begin(), text.end(), text.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return text;
}

bool keys_equal(const Cell& a, const Cell& b) {
  if (a.is_null() || b.is_null()) return a.is_null() && b.is_null();
  if (a.is_numeric() && b.is_numeric()) return a.as_double() == b.as_double();
  if (a.is_bool() || b.is_bool()) return a == b;
  return casefold(trim_copy(a.to_text())) == casefold(trim_copy(b.to_text()));
}

bool cells_match(const Cell& engine, const Cell& truth, double tolerance) {
  if (engine.is_null() || truth.is_null()) return engine.is_null() && truth.is_null();
  if (engine.is_numeric() && truth.is_numeric()) {
    double m = engine.as_double();
    double d = truth.as_double();
    if (d == 0) return m == 0;
    return std::fabs(m - d) / std::fabs(d) < tolerance;
  }
  if (engine.is_bool() || truth.is_bool()) return engine == truth;
  return casefold(trim_copy(engine.to_text())) == casefold(trim_copy(truth.to_text()));
}

void canonical_sort(Relation& rel) {
  std::stable_sort(rel.rows.begin(), rel.rows.end(),
                   [](const std::vector<Cell>& a, const std::vector<Cell>& b) {
                     for (std::size_t i = 0; i < a.size(); ++i) {
                       int cmp = compare_cells(a[i], b[i]);
                       if (cmp != 0) return cmp < 0;
                     }
                     return false;
                   });
}

std::string row_token(const std::vector<Cell>& row) {
  std::string token;
  for (const Cell& cell : row) {
    token += cell.to_text();
    token += '\x1f';
  }
  return token;
}

bool op_holds(sql::CompareOp op, int cmp) {
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

std::string format_percent(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.1f%%", value);
  return buffer;
}

std::string format_signed_percent(double value) {
  double rounded = std::round(value * 10.0) / 10.0;
  if (rounded == 0) rounded = 0;  // never print "-0.0"
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%+.1f%%", rounded);
  return buffer;
}

}  // namespace

const char* to_string(QueryClass qc) {
  switch (qc) {
    case QueryClass::SelectionOnly: return "selection-only";
    case QueryClass::Aggregate: return "aggregate";
    case QueryClass::Join: return "join";
    case QueryClass::Other: return "other";
  }
  return "other";
}

QueryClass parse_query_class(std::string_view name) {
  if (name == "selection-only") return QueryClass::SelectionOnly;
  if (name == "aggregate") return QueryClass::Aggregate;
  if (name == "join") return QueryClass::Join;
  if (name == "other") return QueryClass::Other;
  throw ValidationError("unknown query class: " + std::string(name));
}

const char* to_string(RunMode mode) {
  switch (mode) {
    case RunMode::Sql: return "sql";
    case RunMode::Nl: return "nl";
    case RunMode::NlCot: return "nl-cot";
  }
  return "sql";
}

std::optional<RunMode> parse_run_mode(std::string_view name) {
  if (name == "sql") return RunMode::Sql;
  if (name == "nl") return RunMode::Nl;
  if (name == "nl-cot") return RunMode::NlCot;
  return std::nullopt;
}

Suite load_suite(const std::filesystem::path& dir) {
  Suite suite;
  suite.dir = dir;
  suite.name = dir.filename().string();
  if (suite.name.empty()) suite.name = dir.parent_path().filename().string();

  suite.catalog = load_catalog(read_text_file((dir / "catalog.json").string()), dir);
  suite.facts = backend::FactStore::load_file(dir / "facts.json");
  suite.facts.validate_against(suite.catalog);

  ordered_json doc;
  try {
    doc = ordered_json::parse(read_text_file((dir / "cases.json").string()));
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("cases.json: " + std::string(e.what()));
  }
  if (!doc.is_object() || !doc.contains("cases") || !doc["cases"].is_array()) {
    throw ValidationError("cases.json: expected an object with a \"cases\" array");
  }

  for (const auto& entry : doc["cases"]) {
    if (!entry.is_object()) throw ValidationError("cases.json: each case must be an object");
    QueryCase qc;
    if (!entry.contains("id") || !entry["id"].is_string() ||
        entry["id"].get<std::string>().empty()) {
      throw ValidationError("cases.json: every case needs a non-empty string id");
    }
    qc.id = entry["id"].get<std::string>();
    std::string where = "cases.json case " + qc.id;
    for (const auto& other : suite.cases) {
      if (other.id == qc.id) throw ValidationError(where + ": duplicate id");
    }
    if (!entry.contains("sql") || !entry["sql"].is_string()) {
      throw ValidationError(where + ": missing sql text");
    }
    qc.sql = entry["sql"].get<std::string>();
    if (!entry.contains("class") || !entry["class"].is_string()) {
      throw ValidationError(where + ": missing class");
    }
    try {
      qc.query_class = parse_query_class(entry["class"].get<std::string>());
    } catch (const ValidationError& e) {
      throw ValidationError(where + ": " + e.what());
    }
    if (entry.contains("nl")) {
      if (!entry["nl"].is_string()) throw ValidationError(where + ": nl must be a string");
      qc.nl_question = entry["nl"].get<std::string>();
    }
    if (entry.contains("expected")) {
      if (!entry["expected"].is_array()) {
        throw ValidationError(where + ": expected must be an array of rows");
      }
      std::vector<std::vector<std::string>> rows;
      for (const auto& row : entry["expected"]) {
        if (!row.is_array()) throw ValidationError(where + ": expected rows must be arrays");
        std::vector<std::string> cells;
        for (const auto& value : row) {
          if (value.is_null()) {
            cells.push_back("");
          } else if (value.is_string()) {
            cells.push_back(value.get<std::string>());
          } else if (value.is_boolean()) {
            cells.push_back(value.get<bool>() ? "true" : "false");
          } else if (value.is_number()) {
            cells.push_back(value.dump());
          } else {
            throw ValidationError(where + ": expected cells must be scalars or null");
          }
        }
        rows.push_back(std::move(cells));
      }
      qc.expected = std::move(rows);
    }
    suite.cases.push_back(std::move(qc));
  }
  if (suite.cases.empty()) throw ValidationError("cases.json: suite has no cases");
  return suite;
}

Relation fact_store_table(const RelationDecl& relation, const backend::FactStore& facts,
                          const std::string& prefix) {
  if (relation.source.kind == SourceKind::Local) {
    return exec::load_local_table(relation, prefix);
  }
  Relation out;
  for (const auto& attr : relation.attributes) {
    out.columns.push_back({prefix + "." + attr.name, attr.type});
  }
  auto keys = facts.keys.find(relation.name);
  if (keys == facts.keys.end()) return out;
  for (const std::string& key : keys->second) {
    std::vector<Cell> row;
    row.reserve(relation.attributes.size());
    for (const auto& attr : relation.attributes) {
      std::string where = "facts for " + relation.name + " '" + key + "' " + attr.name;
      if (attr.name == relation.key) {
        row.push_back(strict_cell(key, attr.type, where));
      } else if (const std::string* stored = facts.cell(relation.name, key, attr.name)) {
        row.push_back(strict_cell(*stored, attr.type, where));
      } else {
        row.push_back(Cell::null());
      }
    }
    out.rows.push_back(std::move(row));
  }
  return out;
}

Relation naive_local_eval(const sql::BoundQuery& query, const backend::FactStore& facts) {
  // Product of the FROM tables, columns qualified by effective name.
  Relation working;
  working.rows.push_back({});
  for (const auto& table : query.tables) {
    Relation next = fact_store_table(*table.decl, facts, table.effective_name);
    Relation combined;
    combined.columns = working.columns;
    combined.columns.insert(combined.columns.end(), next.columns.begin(), next.columns.end());
    for (const auto& left : working.rows) {
      for (const auto& right : next.rows) {
        std::vector<Cell> row = left;
        row.insert(row.end(), right.begin(), right.end());
        combined.rows.push_back(std::move(row));
      }
    }
    working = std::move(combined);
  }

  auto column_of = [&](const sql::BoundColumn& col) {
    return working.column_index(query.tables[col.table].effective_name + "." + col.attribute);
  };

  for (const auto& pred : query.predicates) {
    std::size_t lhs = column_of(pred.lhs);
    std::optional<std::size_t> rhs_col;
    if (pred.rhs_is_column()) rhs_col = column_of(pred.rhs_column());
    std::vector<std::vector<Cell>> kept;
    for (auto& row : working.rows) {
      const Cell& a = row[lhs];
      const Cell& b = rhs_col ? row[*rhs_col] : pred.rhs_literal();
      if (a.is_null() || b.is_null()) continue;
      if (op_holds(pred.op, compare_cells(a, b))) kept.push_back(std::move(row));
    }
    working.rows = std::move(kept);
  }

  Relation out = Relation::with_columns(query.output_columns());
  // Source rows carried alongside output rows so ORDER BY can reach
  // non-projected columns in plain queries.
  std::vector<std::vector<Cell>> sources;

  std::vector<std::optional<std::size_t>> item_columns;
  for (const auto& item : query.items) {
    item_columns.push_back(item.column ? std::optional(column_of(*item.column))
                                       : std::nullopt);
  }

  if (query.has_aggregates() || !query.group_by.empty()) {
    std::vector<std::size_t> group_columns;
    for (const auto& col : query.group_by) group_columns.push_back(column_of(col));

    struct Group {
      std::vector<Cell> key;
      std::vector<std::vector<Cell>> values;  // per item: non-null inputs in order
      std::vector<std::int64_t> rows;         // per item: row count for COUNT(*)
      std::vector<Cell> first;                // per item: first value, any null-ness
      std::vector<bool> seen;
    };
    std::map<std::string, std::size_t> position;
    std::vector<Group> groups;

    for (const auto& row : working.rows) {
      std::string token;
      for (std::size_t col : group_columns) {
        token += row[col].to_text();
        token += '\x1f';
      }
      auto entry = position.find(token);
      if (entry == position.end()) {
        entry = position.emplace(token, groups.size()).first;
        Group group;
        for (std::size_t col : group_columns) group.key.push_back(row[col]);
        group.values.resize(query.items.size());
        group.rows.assign(query.items.size(), 0);
        group.first.resize(query.items.size());
        group.seen.assign(query.items.size(), false);
        groups.push_back(std::move(group));
      }
      Group& group = groups[entry->second];
      for (std::size_t i = 0; i < query.items.size(); ++i) {
        const auto& item = query.items[i];
        group.rows[i] += 1;
        if (!item.column) continue;
        const Cell& value = row[*item_columns[i]];
        if (!group.seen[i]) {
          group.first[i] = value;
          group.seen[i] = true;
        }
        if (!value.is_null()) group.values[i].push_back(value);
      }
    }

    if (groups.empty() && group_columns.empty()) {
      Group group;
      group.values.resize(query.items.size());
      group.rows.assign(query.items.size(), 0);
      group.first.resize(query.items.size());
      group.seen.assign(query.items.size(), false);
      groups.push_back(std::move(group));
    }

    for (const Group& group : groups) {
      std::vector<Cell> row;
      for (std::size_t i = 0; i < query.items.size(); ++i) {
        const auto& item = query.items[i];
        const auto& values = group.values[i];
        if (item.star_count) {
          row.push_back(Cell::integer(group.rows[i]));
        } else if (!item.agg) {
          row.push_back(group.first[i]);
        } else if (*item.agg == sql::AggFn::Count) {
          row.push_back(Cell::integer(static_cast<std::int64_t>(values.size())));
        } else if (values.empty()) {
          row.push_back(Cell::null());
        } else if (*item.agg == sql::AggFn::Sum || *item.agg == sql::AggFn::Avg) {
          long double sum = 0;
          for (const Cell& value : values) sum += value.as_double();
          if (*item.agg == sql::AggFn::Avg) {
            row.push_back(Cell::real(static_cast<double>(sum / values.size())));
          } else if (item.output_type == ValueType::Int) {
            row.push_back(Cell::integer(static_cast<std::int64_t>(sum)));
          } else {
            row.push_back(Cell::real(static_cast<double>(sum)));
          }
        } else {
          Cell best = values.front();
          for (const Cell& value : values) {
            int cmp = compare_cells(value, best);
            if (*item.agg == sql::AggFn::Min ? cmp < 0 : cmp > 0) best = value;
          }
          row.push_back(best);
        }
      }
      out.rows.push_back(std::move(row));
    }
  } else {
    for (const auto& row : working.rows) {
      std::vector<Cell> projected;
      for (const auto& col : item_columns) projected.push_back(row[*col]);
      out.rows.push_back(std::move(projected));
      sources.push_back(row);
    }
  }

  if (query.distinct) {
    std::set<std::string> seen;
    std::vector<std::vector<Cell>> rows;
    for (auto& row : out.rows) {
      if (seen.insert(row_token(row)).second) rows.push_back(std::move(row));
    }
    out.rows = std::move(rows);
    sources.clear();  // binder restricts sort keys to outputs past this point
  }

  if (!query.order_by.empty()) {
    struct Key {
      bool projected;
      std::size_t column;
      bool descending;
    };
    std::vector<Key> keys;
    for (const auto& key : query.order_by) {
      keys.push_back({key.output_index.has_value(),
                      key.output_index ? *key.output_index : column_of(*key.column),
                      key.descending});
    }
    std::vector<std::size_t> order(out.rows.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      for (const auto& key : keys) {
        const Cell& va = key.projected ? out.rows[a][key.column] : sources[a][key.column];
        const Cell& vb = key.projected ? out.rows[b][key.column] : sources[b][key.column];
        int cmp = compare_cells(va, vb);
        if (cmp != 0) return key.descending ? cmp > 0 : cmp < 0;
      }
      return false;
    });
    std::vector<std::vector<Cell>> sorted;
    sorted.reserve(out.rows.size());
    for (std::size_t i : order) sorted.push_back(std::move(out.rows[i]));
    out.rows = std::move(sorted);
  }

  if (query.limit && static_cast<std::int64_t>(out.rows.size()) > *query.limit) {
    out.rows.resize(static_cast<std::size_t>(*query.limit));
  }
  if (query.order_by.empty()) canonical_sort(out);
  return out;
}

double cardinality_ratio(std::size_t n_d, std::size_t n_m) {
  if (n_d + n_m == 0) {
    throw ValidationError("cardinality ratio is undefined when both relations are empty");
  }
  return 2.0 * static_cast<double>(n_d) / static_cast<double>(n_d + n_m);
}

double cardinality_report(const std::vector<std::pair<std::size_t, std::size_t>>& counts) {
  double sum = 0;
  std::size_t included = 0;
  for (const auto& [n_d, n_m] : counts) {
    if (n_d + n_m == 0) continue;
    sum += 1.0 - cardinality_ratio(n_d, n_m);
    ++included;
  }
  if (included == 0) {
    throw ValidationError("cardinality report needs at least one case with rows");
  }
  return 100.0 * sum / static_cast<double>(included);
}

CellMatch cell_match_score(const Relation& engine, const Relation& truth,
                           std::optional<std::size_t> key_column, double tolerance) {
  if (engine.columns.size() != truth.columns.size()) {
    throw ValidationError("cell match requires identical schemas");
  }
  for (std::size_t i = 0; i < engine.columns.size(); ++i) {
    if (engine.columns[i].name != truth.columns[i].name ||
        engine.columns[i].type != truth.columns[i].type) {
      throw ValidationError("cell match requires identical schemas");
    }
  }
  if (key_column && *key_column >= truth.columns.size()) {
    throw ValidationError("cell match key column out of range");
  }

  CellMatch score;
  score.total = truth.rows.size() * truth.columns.size();

  std::vector<bool> used(engine.rows.size(), false);
  for (std::size_t t = 0; t < truth.rows.size(); ++t) {
    std::optional<std::size_t> aligned;
    if (key_column) {
      for (std::size_t e = 0; e < engine.rows.size(); ++e) {
        if (used[e]) continue;
        if (keys_equal(engine.rows[e][*key_column], truth.rows[t][*key_column])) {
          aligned = e;
          break;
        }
      }
    } else if (t < engine.rows.size()) {
      aligned = t;
    }
    if (!aligned) continue;
    used[*aligned] = true;
    for (std::size_t c = 0; c < truth.columns.size(); ++c) {
      if (cells_match(engine.rows[*aligned][c], truth.rows[t][c], tolerance)) ++score.matched;
    }
  }
  score.spurious_rows = engine.rows.size() -
                        static_cast<std::size_t>(std::count(used.begin(), used.end(), true));
  score.percent = score.total == 0
                      ? 100.0
                      : 100.0 * static_cast<double>(score.matched) /
                            static_cast<double>(score.total);
  return score;
}

namespace {

Relation literal_truth(const sql::BoundQuery& query,
                       const std::vector<std::vector<std::string>>& rows) {
  Relation out = Relation::with_columns(query.output_columns());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != out.columns.size()) {
      throw ValidationError("expected row " + std::to_string(r) + " has " +
                            std::to_string(rows[r].size()) + " cells, query outputs " +
                            std::to_string(out.columns.size()));
    }
    std::vector<Cell> row;
    for (std::size_t c = 0; c < out.columns.size(); ++c) {
      row.push_back(strict_cell(rows[r][c], out.columns[c].type,
                                "expected row " + std::to_string(r)));
    }
    out.rows.push_back(std::move(row));
  }
  if (query.order_by.empty()) canonical_sort(out);
  return out;
}

// Ground truth rendered the way the natural language parser sees answers:
// one text column, multi-column rows joined with a comma.
Relation flatten_truth(const Relation& truth) {
  Relation out = Relation::with_columns({{"answer", ValueType::Text}});
  for (const auto& row : truth.rows) {
    std::string text;
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i > 0) text += ", ";
      text += row[i].to_text();
    }
    out.rows.push_back({Cell::text(text)});
  }
  return out;
}

// First plain projected column; its values identify tuples. All-aggregate
// outputs align positionally.
std::optional<std::size_t> alignment_key(const sql::BoundQuery& query) {
  for (std::size_t i = 0; i < query.items.size(); ++i) {
    if (!query.items[i].agg && !query.items[i].star_count && query.items[i].column) {
      return i;
    }
  }
  return std::nullopt;
}

}  // namespace

EvalReport run_benchmark(const Suite& suite, backend::Backend& backend,
                         const prompt::Compiler& compiler, const BenchOptions& options) {
  EvalReport report;
  report.suite = suite.name;
  report.tolerance = options.tolerance;
  report.modes = options.modes;

  for (RunMode mode : options.modes) {
    ModeSummary summary;
    summary.mode = mode;
    std::vector<std::pair<std::size_t, std::size_t>> counts;
    std::vector<double> cell_percents;
    std::map<QueryClass, std::vector<double>> class_percents;

    for (const QueryCase& qc : suite.cases) {
      CaseResult result;
      result.id = qc.id;
      result.query_class = qc.query_class;
      result.mode = mode;
      ++summary.cases;

      try {
        auto bound = sql::bind(sql::parse(qc.sql), suite.catalog);
        Relation truth = qc.expected ? literal_truth(bound, *qc.expected)
                                     : naive_local_eval(bound, suite.facts);

        Relation engine;
        std::optional<std::size_t> key;
        if (mode == RunMode::Sql) {
          auto logical = plan::build_logical_plan(std::move(bound));
          if (options.optimize) logical = plan::push_down_selections(std::move(logical));
          auto physical =
              plan::lower_to_physical(logical, suite.catalog, options.filter_mode);
          engine = exec::execute(physical, backend, compiler, options.exec);
          key = alignment_key(*physical.query);
        } else {
          if (qc.nl_question.empty()) {
            throw ValidationError("case has no natural language question");
          }
          auto mode_flag =
              mode == RunMode::NlCot ? prompt::NlMode::ChainOfThought : prompt::NlMode::Plain;
          auto nl = exec::run_nl(qc.nl_question, mode_flag, backend, compiler);
          result.raw_answer = nl.raw;
          result.experimental = true;
          engine = std::move(nl.parsed);
          truth = flatten_truth(truth);
          key = 0;
        }

        result.truth_rows = truth.rows.size();
        result.engine_rows = engine.rows.size();
        result.cells = cell_match_score(engine, truth, key, options.tolerance);
        if (result.truth_rows + result.engine_rows > 0) {
          result.f = cardinality_ratio(result.truth_rows, result.engine_rows);
        } else {
          ++summary.excluded;
        }
      } catch (const std::exception& e) {
        result.failed = true;
        result.error = e.what();
        ++summary.failed;
      }

      if (!result.failed) {
        if (result.f) {
          counts.emplace_back(result.truth_rows, result.engine_rows);
          if (*result.f > 1.99) ++summary.near_empty;
        }
        cell_percents.push_back(result.cells.percent);
        class_percents[result.query_class].push_back(result.cells.percent);
      }
      report.cases.push_back(std::move(result));
    }

    if (!counts.empty()) summary.one_minus_f_percent = cardinality_report(counts);
    if (!cell_percents.empty()) {
      summary.cell_match_percent =
          std::accumulate(cell_percents.begin(), cell_percents.end(), 0.0) /
          static_cast<double>(cell_percents.size());
    }
    for (const auto& [qc, percents] : class_percents) {
      summary.class_cell_match[qc] = std::accumulate(percents.begin(), percents.end(), 0.0) /
                                     static_cast<double>(percents.size());
    }
    report.summaries.push_back(std::move(summary));
  }

  report.stats = backend.stats();
  return report;
}

std::string report_to_json(const EvalReport& report) {
  ordered_json doc;
  doc["suite"] = report.suite;
  doc["tolerance"] = report.tolerance;
  doc["modes"] = ordered_json::array();
  for (RunMode mode : report.modes) doc["modes"].push_back(to_string(mode));
  doc["note"] =
      "tuples are aligned by normalized key equality; manual alignment may differ";

  doc["cases"] = ordered_json::array();
  for (const CaseResult& result : report.cases) {
    ordered_json entry;
    entry["id"] = result.id;
    entry["class"] = to_string(result.query_class);
    entry["mode"] = to_string(result.mode);
    entry["status"] = result.failed ? "failed" : "ok";
    if (result.failed) {
      entry["error"] = result.error;
    } else {
      entry["truth_rows"] = result.truth_rows;
      entry["engine_rows"] = result.engine_rows;
      if (result.f) {
        entry["f"] = *result.f;
        entry["one_minus_f"] = 1.0 - *result.f;
      } else {
        entry["f"] = nullptr;
        entry["one_minus_f"] = nullptr;
      }
      entry["cell_match"] = {{"percent", result.cells.percent},
                             {"matched", result.cells.matched},
                             {"total", result.cells.total},
                             {"spurious_rows", result.cells.spurious_rows}};
      if (result.experimental) {
        entry["experimental"] = true;
        entry["raw_answer"] = result.raw_answer;
      }
    }
    doc["cases"].push_back(std::move(entry));
  }

  doc["summary"] = ordered_json::array();
  for (const ModeSummary& summary : report.summaries) {
    ordered_json entry;
    entry["mode"] = to_string(summary.mode);
    entry["cases"] = summary.cases;
    entry["failed"] = summary.failed;
    entry["excluded"] = summary.excluded;
    entry["near_empty"] = summary.near_empty;
    entry["one_minus_f_percent"] = summary.one_minus_f_percent;
    entry["cell_match_percent"] = summary.cell_match_percent;
    ordered_json per_class = ordered_json::object();
    for (const auto& [qc, percent] : summary.class_cell_match) {
      per_class[to_string(qc)] = percent;
    }
    entry["per_class"] = std::move(per_class);
    doc["summary"].push_back(std::move(entry));
  }

  doc["backend"] = {{"calls", report.stats.calls}, {"prompt_chars", report.stats.prompt_chars}};
  return doc.dump(2) + "\n";
}

std::string render_report_table(const EvalReport& report) {
  std::string out = "benchmark: " + report.suite + "\n";
  char line[160];
  std::snprintf(line, sizeof line, "%-24s %-15s %-7s %9s %7s %8s\n", "case", "class", "mode",
                "rows D/M", "f", "cells");
  out += line;
  for (const CaseResult& result : report.cases) {
    if (result.failed) {
      std::snprintf(line, sizeof line, "%-24s %-15s %-7s failed: %.60s\n", result.id.c_str(),
                    to_string(result.query_class), to_string(result.mode),
                    result.error.c_str());
      out += line;
      continue;
    }
    std::string rows = std::to_string(result.truth_rows) + "/" +
                       std::to_string(result.engine_rows);
    std::string f = result.f ? [&] {
      char buffer[32];
      std::snprintf(buffer, sizeof buffer, "%.3f", *result.f);
      return std::string(buffer);
    }() : std::string("-");
    std::snprintf(line, sizeof line, "%-24s %-15s %-7s %9s %7s %8s\n", result.id.c_str(),
                  to_string(result.query_class), to_string(result.mode), rows.c_str(),
                  f.c_str(), format_percent(result.cells.percent).c_str());
    out += line;
  }
  for (const ModeSummary& summary : report.summaries) {
    std::snprintf(line, sizeof line,
                  "mode %s: cases %zu  failed %zu  excluded %zu  near-empty %zu\n",
                  to_string(summary.mode), summary.cases, summary.failed, summary.excluded,
                  summary.near_empty);
    out += line;
    out += "1-f: " + format_signed_percent(summary.one_minus_f_percent) +
           "  cell-match: " + format_percent(summary.cell_match_percent) + "\n";
    for (const auto& [qc, percent] : summary.class_cell_match) {
      std::snprintf(line, sizeof line, "  %-15s %s\n", to_string(qc),
                    format_percent(percent).c_str());
      out += line;
    }
  }
  std::snprintf(line, sizeof line, "backend calls: %llu  prompt chars: %llu\n",
                static_cast<unsigned long long>(report.stats.calls),
                static_cast<unsigned long long>(report.stats.prompt_chars));
  out += line;
  return out;
}

}  // namespace galois::harness

#include "galois/executor.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <future>

#include "galois/csv.hpp"
#include "galois/errors.hpp"
#include "galois/logging.hpp"

namespace galois::exec {

namespace {

using plan::PhysicalNode;
using plan::PhysicalOp;
using sql::BoundPredicate;
using sql::BoundQuery;

prompt::Condition to_condition(const BoundPredicate& pred) {
  return {pred.lhs.attribute, pred.op, pred.rhs_literal()};
}

std::string qualified_name(const BoundQuery& q, std::size_t table,
                           const std::string& attribute) {
  return q.tables[table].effective_name + "." + attribute;
}

Cell parse_local_cell(const std::string& raw, const AttrDecl& attr, const std::string& where) {
  std::string text = trim_copy(raw);
  if (text.empty()) return Cell::null();
  switch (attr.type) {
    case ValueType::Text:
      return Cell::text(text);
    case ValueType::Int: {
      std::int64_t value = 0;
      auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
      if (ec != std::errc() || ptr != text.data() + text.size()) {
        throw ExecError(where + ": cannot parse '" + text + "' as int");
      }
      return Cell::integer(value);
    }
    case ValueType::Float: {
      double value = 0;
      auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
      if (ec != std::errc() || ptr != text.data() + text.size()) {
        throw ExecError(where + ": cannot parse '" + text + "' as float");
      }
      return Cell::real(value);
    }
    case ValueType::Bool:
      if (text == "true") return Cell::boolean(true);
      if (text == "false") return Cell::boolean(false);
      throw ExecError(where + ": cannot parse '" + text + "' as bool");
  }
  return Cell::null();
}

bool compare_op_holds(sql::CompareOp op, int cmp) {
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

// Runs prompts for a batch of keys with bounded fan-out and deterministic
// result order (results are keyed, not appended).
template <typename Fn>
void for_each_key_batched(const std::vector<Cell>& keys, int batch_size, const Fn& fn) {
  std::size_t batch = batch_size > 0 ? static_cast<std::size_t>(batch_size) : 1;
  for (std::size_t begin = 0; begin < keys.size(); begin += batch) {
    std::size_t end = std::min(begin + batch, keys.size());
    std::vector<std::future<void>> inflight;
    inflight.reserve(end - begin);
    for (std::size_t i = begin; i < end; ++i) {
      inflight.push_back(std::async(std::launch::async, [&fn, &keys, i] { fn(keys[i]); }));
    }
    for (auto& f : inflight) f.get();
  }
}

class PlanRunner {
 public:
  PlanRunner(const plan::PhysicalPlan& plan, backend::Backend& backend,
             const prompt::Compiler& compiler, const ExecConfig& config)
      : q_(*plan.query), backend_(backend), compiler_(compiler), config_(config) {}

  Relation run(const PhysicalNode& root) {
    Relation result = eval(root);
    if (q_.order_by.empty()) {
      std::stable_sort(result.rows.begin(), result.rows.end(),
                       [](const std::vector<Cell>& a, const std::vector<Cell>& b) {
                         for (std::size_t i = 0; i < a.size(); ++i) {
                           int cmp = compare_cells(a[i], b[i]);
                           if (cmp != 0) return cmp < 0;
                         }
                         return false;
                       });
    }
    return result;
  }

 private:
  Relation eval(const PhysicalNode& node) {
    Relation out;
    switch (node.op) {
      case PhysicalOp::LlmScan: out = llm_scan(node); break;
      case PhysicalOp::LlmFetch: out = llm_fetch(node); break;
      case PhysicalOp::LlmFilter: out = llm_filter(node); break;
      case PhysicalOp::LocalScan: out = local_scan(node); break;
      case PhysicalOp::LocalFilter: out = local_filter(node); break;
      case PhysicalOp::LocalJoin: out = local_join(node); break;
      case PhysicalOp::LocalAggregate: out = local_aggregate(node); break;
      case PhysicalOp::LocalProject: out = local_project(node); break;
      case PhysicalOp::LocalDistinct: out = local_distinct(node); break;
      case PhysicalOp::LocalSort: out = local_sort(node); break;
      case PhysicalOp::LocalLimit: out = local_limit(node); break;
    }
    if (config_.row_cap && static_cast<std::int64_t>(out.rows.size()) > *config_.row_cap) {
      throw ExecError("row cap exceeded: " + std::string(plan::to_string(node.op)) +
                      " produced " + std::to_string(out.rows.size()) + " rows, cap is " +
                      std::to_string(*config_.row_cap));
    }
    return out;
  }

  Relation llm_scan(const PhysicalNode& node) {
    const auto& table = q_.tables[node.table];
    const RelationDecl& decl = *table.decl;
    std::optional<prompt::Condition> fused;
    if (node.predicate) fused = to_condition(*node.predicate);
    auto program = compiler_.compile_scan(decl, fused);
    auto items = run_scan(program, backend_, config_);

    const AttrDecl& key_attr = decl.key_attribute();
    Relation out = Relation::with_columns(
        {{qualified_name(q_, node.table, decl.key), key_attr.type}});
    std::set<std::string> seen;
    for (const std::string& item : items) {
      Cell cell = norm::normalize_value(item, key_attr.type);
      cell = norm::enforce_domain(cell, key_attr, config_.on_reject);
      if (cell.is_null()) {
        log::warn("scan of " + decl.name + " returned unusable key '" + item + "'");
        continue;
      }
      if (seen.insert(cell.to_text()).second) out.rows.push_back({cell});
    }
    return out;
  }

  // Distinct non-null keys of the node's table in first-seen order.
  std::vector<Cell> gather_keys(const Relation& input, std::size_t table,
                                std::size_t* key_column) const {
    const auto& decl = *q_.tables[table].decl;
    std::size_t column = input.column_index(qualified_name(q_, table, decl.key));
    if (key_column) *key_column = column;
    std::vector<Cell> keys;
    std::set<std::string> seen;
    for (const auto& row : input.rows) {
      const Cell& cell = row[column];
      if (cell.is_null()) continue;
      if (seen.insert(cell.to_text()).second) keys.push_back(cell);
    }
    return keys;
  }

  Relation llm_fetch(const PhysicalNode& node) {
    Relation input = eval(*node.children[0]);
    const auto& table = q_.tables[node.table];
    const AttrDecl& attr = *table.decl->find_attribute(node.attribute);

    std::size_t key_column = 0;
    std::vector<Cell> keys = gather_keys(input, node.table, &key_column);
    auto fetched = run_fetch(*table.decl, keys, attr, backend_, compiler_, config_);

    Relation out = input;
    out.columns.push_back({qualified_name(q_, node.table, attr.name), attr.type});
    for (auto& row : out.rows) {
      const Cell& key = row[key_column];
      Cell value;
      if (!key.is_null()) {
        auto hit = fetched.find(key.to_text());
        if (hit != fetched.end()) value = hit->second;
      }
      row.push_back(std::move(value));
    }
    return out;
  }

  Relation llm_filter(const PhysicalNode& node) {
    Relation input = eval(*node.children[0]);
    const BoundPredicate& pred = *node.predicate;
    const auto& table = q_.tables[pred.lhs.table];

    std::size_t key_column = 0;
    std::vector<Cell> keys = gather_keys(input, pred.lhs.table, &key_column);
    auto survivors = run_llm_filter(*table.decl, keys, to_condition(pred), backend_,
                                    compiler_, config_);

    Relation out = Relation::with_columns(input.columns);
    for (auto& row : input.rows) {
      const Cell& key = row[key_column];
      if (key.is_null()) continue;
      if (survivors.count(key.to_text())) out.rows.push_back(std::move(row));
    }
    return out;
  }

  Relation local_scan(const PhysicalNode& node) {
    const auto& table = q_.tables[node.table];
    return load_local_table(*table.decl, table.effective_name);
  }

  // Shared by LocalFilter and join conditions.
  Cell row_value(const Relation& rel, const std::vector<Cell>& row,
                 const sql::BoundColumn& col) const {
    return row[rel.column_index(qualified_name(q_, col.table, col.attribute))];
  }

  bool predicate_holds(const Relation& rel, const std::vector<Cell>& row,
                       const BoundPredicate& pred) const {
    Cell lhs = row_value(rel, row, pred.lhs);
    Cell rhs = pred.rhs_is_column() ? row_value(rel, row, pred.rhs_column())
                                    : pred.rhs_literal();
    if (lhs.is_null() || rhs.is_null()) return false;
    return compare_op_holds(pred.op, compare_cells(lhs, rhs));
  }

  Relation local_filter(const PhysicalNode& node) {
    Relation input = eval(*node.children[0]);
    Relation out = Relation::with_columns(input.columns);
    for (auto& row : input.rows) {
      if (predicate_holds(input, row, *node.predicate)) out.rows.push_back(std::move(row));
    }
    return out;
  }

  // Join keys canonicalize through the alias map and optional case fold;
  // numeric keys always compare by value.
  std::string canonical_join_text(const Cell& cell) const {
    std::string text = cell.to_text();
    auto alias = config_.join_alias.find(text);
    if (alias != config_.join_alias.end()) text = alias->second;
    if (config_.join_fold == JoinFold::Case) {
      std::transform(text.begin(), text.end(), text.begin(), [](unsigned char c) {
        return static_cast<char>(std::tolower(c));
      });
    }
    return text;
  }

  bool join_keys_equal(const Cell& a, const Cell& b) const {
    if (a.is_null() || b.is_null()) return false;
    if (a.is_numeric() && b.is_numeric()) return a.as_double() == b.as_double();
    return canonical_join_text(a) == canonical_join_text(b);
  }

  Relation local_join(const PhysicalNode& node) {
    Relation left = eval(*node.children[0]);
    Relation right = eval(*node.children[1]);

    Relation out;
    out.columns = left.columns;
    out.columns.insert(out.columns.end(), right.columns.begin(), right.columns.end());

    // Resolve each condition to (left index, right index) pairs up front.
    struct Pair {
      std::size_t left;
      std::size_t right;
    };
    std::vector<Pair> pairs;
    for (const auto& pred : node.conditions) {
      std::string a = qualified_name(q_, pred.lhs.table, pred.lhs.attribute);
      std::string b = qualified_name(q_, pred.rhs_column().table,
                                     pred.rhs_column().attribute);
      auto la = left.find_column(a);
      Pair pair;
      if (la) {
        pair.left = *la;
        pair.right = right.column_index(b);
      } else {
        pair.left = left.column_index(b);
        pair.right = right.column_index(a);
      }
      pairs.push_back(pair);
    }

    for (const auto& lrow : left.rows) {
      for (const auto& rrow : right.rows) {
        bool match = true;
        for (const auto& pair : pairs) {
          if (!join_keys_equal(lrow[pair.left], rrow[pair.right])) {
            match = false;
            break;
          }
        }
        if (!match) continue;
        std::vector<Cell> row = lrow;
        row.insert(row.end(), rrow.begin(), rrow.end());
        out.rows.push_back(std::move(row));
        if (config_.row_cap &&
            static_cast<std::int64_t>(out.rows.size()) > *config_.row_cap) {
          throw ExecError("row cap exceeded inside a join");
        }
      }
    }
    return out;
  }

  Relation local_aggregate(const PhysicalNode& node) {
    Relation input = eval(*node.children[0]);

    std::vector<std::size_t> group_columns;
    for (const auto& col : q_.group_by) {
      group_columns.push_back(
          input.column_index(qualified_name(q_, col.table, col.attribute)));
    }
    std::vector<std::optional<std::size_t>> item_columns;
    for (const auto& item : q_.items) {
      if (item.column) {
        item_columns.push_back(
            input.column_index(qualified_name(q_, item.column->table, item.column->attribute)));
      } else {
        item_columns.push_back(std::nullopt);
      }
    }

    struct Accumulator {
      std::int64_t count = 0;       // rows (COUNT(*)) or non-null values
      long double sum = 0;          // SUM, AVG
      Cell best;                    // MIN, MAX
      Cell first;                   // ungrouped plain column
      bool seen = false;
    };
    struct Group {
      std::vector<Cell> key;
      std::vector<Accumulator> accs;
    };

    std::map<std::string, std::size_t> index;
    std::vector<Group> groups;

    auto group_token = [&](const std::vector<Cell>& row) {
      std::string token;
      for (std::size_t col : group_columns) {
        token += row[col].to_text();
        token += '\x1f';
      }
      return token;
    };

    for (const auto& row : input.rows) {
      std::string token = group_token(row);
      auto entry = index.find(token);
      if (entry == index.end()) {
        entry = index.emplace(token, groups.size()).first;
        Group group;
        for (std::size_t col : group_columns) group.key.push_back(row[col]);
        group.accs.resize(q_.items.size());
        groups.push_back(std::move(group));
      }
      Group& group = groups[entry->second];
      for (std::size_t i = 0; i < q_.items.size(); ++i) {
        const auto& item = q_.items[i];
        Accumulator& acc = group.accs[i];
        if (item.star_count) {
          ++acc.count;
          continue;
        }
        const Cell& value = row[*item_columns[i]];
        if (!item.agg) {
          if (!acc.seen) {
            acc.first = value;
            acc.seen = true;
          }
          continue;
        }
        if (value.is_null()) continue;
        switch (*item.agg) {
          case sql::AggFn::Count:
            ++acc.count;
            break;
          case sql::AggFn::Sum:
          case sql::AggFn::Avg:
            ++acc.count;
            acc.sum += value.as_double();
            break;
          case sql::AggFn::Min:
            if (!acc.seen || compare_cells(value, acc.best) < 0) acc.best = value;
            acc.seen = true;
            break;
          case sql::AggFn::Max:
            if (!acc.seen || compare_cells(value, acc.best) > 0) acc.best = value;
            acc.seen = true;
            break;
        }
      }
    }

    // A grand aggregate over nothing still yields one row.
    if (groups.empty() && group_columns.empty()) {
      Group group;
      group.accs.resize(q_.items.size());
      groups.push_back(std::move(group));
    }

    Relation out = Relation::with_columns(q_.output_columns());
    for (const Group& group : groups) {
      std::vector<Cell> row;
      for (std::size_t i = 0; i < q_.items.size(); ++i) {
        const auto& item = q_.items[i];
        const Accumulator& acc = group.accs[i];
        if (item.star_count) {
          row.push_back(Cell::integer(acc.count));
        } else if (!item.agg) {
          row.push_back(acc.first);
        } else {
          switch (*item.agg) {
            case sql::AggFn::Count:
              row.push_back(Cell::integer(acc.count));
              break;
            case sql::AggFn::Sum:
              if (acc.count == 0) {
                row.push_back(Cell::null());
              } else if (item.output_type == ValueType::Int) {
                row.push_back(Cell::integer(static_cast<std::int64_t>(acc.sum)));
              } else {
                row.push_back(Cell::real(static_cast<double>(acc.sum)));
              }
              break;
            case sql::AggFn::Avg:
              row.push_back(acc.count == 0
                                ? Cell::null()
                                : Cell::real(static_cast<double>(acc.sum / acc.count)));
              break;
            case sql::AggFn::Min:
            case sql::AggFn::Max:
              row.push_back(acc.seen ? acc.best : Cell::null());
              break;
          }
        }
      }
      out.rows.push_back(std::move(row));
    }
    return out;
  }

  Relation local_project(const PhysicalNode& node) {
    Relation input = eval(*node.children[0]);
    std::vector<std::size_t> sources;
    for (const auto& item : q_.items) {
      sources.push_back(
          input.column_index(qualified_name(q_, item.column->table, item.column->attribute)));
    }
    Relation out = Relation::with_columns(q_.output_columns());
    for (const auto& row : input.rows) {
      std::vector<Cell> projected;
      projected.reserve(sources.size());
      for (std::size_t col : sources) projected.push_back(row[col]);
      out.rows.push_back(std::move(projected));
    }
    return out;
  }

  Relation local_distinct(const PhysicalNode& node) {
    Relation input = eval(*node.children[0]);
    Relation out = Relation::with_columns(input.columns);
    std::set<std::string> seen;
    for (auto& row : input.rows) {
      std::string token;
      for (const Cell& cell : row) {
        token += cell.to_text();
        token += '\x1f';
      }
      if (seen.insert(token).second) out.rows.push_back(std::move(row));
    }
    return out;
  }

  Relation local_sort(const PhysicalNode& node) {
    Relation input = eval(*node.children[0]);
    std::vector<std::pair<std::size_t, bool>> keys;  // column index, descending
    for (const auto& key : node.sort_keys) {
      std::size_t column = key.output_index
                               ? *key.output_index
                               : input.column_index(qualified_name(
                                     q_, key.column->table, key.column->attribute));
      keys.emplace_back(column, key.descending);
    }
    std::stable_sort(input.rows.begin(), input.rows.end(),
                     [&keys](const std::vector<Cell>& a, const std::vector<Cell>& b) {
                       for (const auto& [column, descending] : keys) {
                         int cmp = compare_cells(a[column], b[column]);
                         if (cmp != 0) return descending ? cmp > 0 : cmp < 0;
                       }
                       return false;
                     });
    return input;
  }

  Relation local_limit(const PhysicalNode& node) {
    Relation input = eval(*node.children[0]);
    if (static_cast<std::int64_t>(input.rows.size()) > node.limit) {
      input.rows.resize(static_cast<std::size_t>(node.limit));
    }
    return input;
  }

  const BoundQuery& q_;
  backend::Backend& backend_;
  const prompt::Compiler& compiler_;
  const ExecConfig& config_;
};

}  // namespace

std::vector<std::string> run_scan(const prompt::PromptProgram& program,
                                  backend::Backend& backend, const ExecConfig& config) {
  std::vector<std::string> results;
  std::vector<backend::Turn> turns;
  int budget = std::min(program.stop.max_iterations, config.max_iterations);
  for (int i = 0; i < budget; ++i) {
    backend::CompletionRequest request;
    request.prompt = i == 0 ? program.initial : program.continuation;
    request.conversation = turns;
    std::string raw = backend.complete(request);
    turns.push_back({request.prompt.body, raw});
    if (norm::is_refusal(raw)) break;
    std::size_t before = results.size();
    for (std::string& item : norm::parse_list_answer(raw)) {
      if (std::find(results.begin(), results.end(), item) == results.end()) {
        results.push_back(std::move(item));
      }
    }
    if (results.size() == before) break;  // nothing new, the model is looping
  }
  return results;
}

std::map<std::string, Cell> run_fetch(const RelationDecl& relation,
                                      const std::vector<Cell>& keys,
                                      const AttrDecl& attribute, backend::Backend& backend,
                                      const prompt::Compiler& compiler,
                                      const ExecConfig& config) {
  std::map<std::string, Cell> out;
  std::mutex mutex;
  for_each_key_batched(keys, config.batch_size, [&](const Cell& key) {
    backend::CompletionRequest request;
    request.prompt = compiler.compile_fetch(relation, key, attribute);
    std::string raw = backend.complete(request);
    Cell cell = norm::normalize_value(raw, attribute.type);
    cell = norm::enforce_domain(cell, attribute, config.on_reject);
    std::lock_guard<std::mutex> lock(mutex);
    out[key.to_text()] = std::move(cell);
  });
  return out;
}

std::set<std::string> run_llm_filter(const RelationDecl& relation,
                                     const std::vector<Cell>& keys,
                                     const prompt::Condition& condition,
                                     backend::Backend& backend,
                                     const prompt::Compiler& compiler,
                                     const ExecConfig& config) {
  std::set<std::string> survivors;
  std::mutex mutex;
  for_each_key_batched(keys, config.batch_size, [&](const Cell& key) {
    backend::CompletionRequest request;
    request.prompt = compiler.compile_filter(relation, key, condition);
    std::string raw = backend.complete(request);
    switch (norm::parse_boolean_answer(raw)) {
      case norm::BoolAnswer::Yes: {
        std::lock_guard<std::mutex> lock(mutex);
        survivors.insert(key.to_text());
        break;
      }
      case norm::BoolAnswer::No:
        break;
      case norm::BoolAnswer::Unknown:
        log::warn("filter on " + relation.name + " '" + key.to_text() +
                  "' got an unusable answer: " + raw);
        break;
    }
  });
  return survivors;
}

Relation load_local_table(const RelationDecl& relation, const std::string& prefix) {
  auto rows = parse_csv(read_text_file(relation.source.resolved_path));
  Relation out;
  for (const auto& attr : relation.attributes) {
    out.columns.push_back({prefix + "." + attr.name, attr.type});
  }
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& raw = rows[r];
    if (raw.size() != relation.attributes.size()) {
      throw ExecError("local table " + relation.name + " row " + std::to_string(r) +
                      " has " + std::to_string(raw.size()) + " fields, expected " +
                      std::to_string(relation.attributes.size()));
    }
    std::vector<Cell> row;
    row.reserve(raw.size());
    for (std::size_t c = 0; c < raw.size(); ++c) {
      row.push_back(parse_local_cell(raw[c], relation.attributes[c],
                                     "local table " + relation.name + " row " +
                                         std::to_string(r)));
    }
    out.rows.push_back(std::move(row));
  }
  return out;
}

Relation execute(const plan::PhysicalPlan& plan, backend::Backend& backend,
                 const prompt::Compiler& compiler, const ExecConfig& config) {
  PlanRunner runner(plan, backend, compiler, config);
  return runner.run(*plan.root);
}

NlResult run_nl(const std::string& question, prompt::NlMode mode, backend::Backend& backend,
                const prompt::Compiler& compiler) {
  backend::CompletionRequest request;
  request.prompt = compiler.compile_nl(question, mode);
  NlResult result;
  result.raw = backend.complete(request);
  result.parsed = Relation::with_columns({{"answer", ValueType::Text}});
  if (!norm::is_refusal(result.raw)) {
    for (const std::string& item : norm::parse_list_answer(result.raw)) {
      result.parsed.rows.push_back({Cell::text(item)});
    }
  }
  return result;
}

}  // namespace galois::exec

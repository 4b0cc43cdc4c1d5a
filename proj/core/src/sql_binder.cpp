#include "galois/sql_binder.hpp"

#include <set>

#include "galois/errors.hpp"
#include "galois/logging.hpp"

namespace galois::sql {

namespace {

std::string render_rhs(const BoundPredicate& pred) {
  if (pred.rhs_is_column()) return pred.rhs_column().qualified();
  const Cell& lit = pred.rhs_literal();
  if (lit.is_text()) return "'" + lit.as_text() + "'";
  return lit.to_text();
}

class Binder {
 public:
  Binder(const QueryAst& ast, const Catalog& catalog) : ast_(ast), catalog_(catalog) {}

  BoundQuery run() {
    BoundQuery q;
    q.catalog = &catalog_;
    q.ast = ast_;
    q.distinct = ast_.distinct;
    q.limit = ast_.limit;

    std::set<std::string> names;
    for (const auto& from : ast_.from) {
      BoundTable table;
      table.effective_name = from.effective_name();
      table.decl = &catalog_.resolve(from.relation);
      if (!names.insert(table.effective_name).second) {
        throw BindError("duplicate table name in FROM: " + table.effective_name);
      }
      tables_.push_back(table);
    }
    q.tables = tables_;

    for (const auto& item : ast_.items) bind_select_item(q, item);
    for (const auto& pred : ast_.where) q.predicates.push_back(bind_predicate(pred));
    for (const auto& ref : ast_.group_by) q.group_by.push_back(resolve(ref));
    for (const auto& item : ast_.order_by) q.order_by.push_back(bind_order_item(q, item));

    if (q.limit && q.order_by.empty()) {
      log::warn("LIMIT without ORDER BY keeps the first rows in source order");
    }
    return q;
  }

 private:
  BoundColumn resolve(const ColumnRef& ref) const {
    if (ref.qualifier) {
      for (std::size_t i = 0; i < tables_.size(); ++i) {
        if (tables_[i].effective_name == *ref.qualifier) {
          return make_column(i, ref);
        }
      }
      throw BindError("unknown table in column reference: " + ref.display());
    }
    std::optional<std::size_t> found;
    for (std::size_t i = 0; i < tables_.size(); ++i) {
      if (tables_[i].decl->find_attribute(ref.name)) {
        if (found) {
          throw BindError("ambiguous column: " + ref.name + " (in " +
                          tables_[*found].effective_name + " and " +
                          tables_[i].effective_name + ")");
        }
        found = i;
      }
    }
    if (!found) throw BindError("unknown column: " + ref.name);
    return make_column(*found, ref);
  }

  BoundColumn make_column(std::size_t table, const ColumnRef& ref) const {
    const AttrDecl* attr = tables_[table].decl->find_attribute(ref.name);
    if (!attr) {
      throw BindError("relation " + tables_[table].decl->name + " has no attribute " + ref.name);
    }
    BoundColumn col;
    col.table = table;
    col.attribute = attr->name;
    col.type = attr->type;
    col.table_name = tables_[table].effective_name;
    return col;
  }

  static bool literal_compatible(ValueType attr, const Cell& literal) {
    switch (attr) {
      case ValueType::Text: return literal.is_text();
      case ValueType::Int:
      case ValueType::Float: return literal.is_numeric();
      case ValueType::Bool: return literal.is_bool();
    }
    return false;
  }

  static bool column_compatible(ValueType a, ValueType b) {
    if (a == b) return true;
    auto numeric = [](ValueType t) { return t == ValueType::Int || t == ValueType::Float; };
    return numeric(a) && numeric(b);
  }

  BoundPredicate bind_predicate(const Predicate& pred) const {
    BoundPredicate bound;
    bound.lhs = resolve(pred.lhs);
    bound.op = pred.op;
    bool is_order_op = pred.op != CompareOp::Eq && pred.op != CompareOp::Ne;
    if (pred.rhs_is_column()) {
      BoundColumn rhs = resolve(std::get<ColumnRef>(pred.rhs));
      if (!column_compatible(bound.lhs.type, rhs.type)) {
        throw BindError("type mismatch comparing " + bound.lhs.qualified() + " with " +
                        rhs.qualified());
      }
      if (bound.lhs.type == ValueType::Bool && is_order_op) {
        throw BindError("bool columns only support = and !=");
      }
      bound.rhs = rhs;
    } else {
      const Cell& literal = std::get<Cell>(pred.rhs);
      if (!literal_compatible(bound.lhs.type, literal)) {
        throw BindError("type mismatch: " + bound.lhs.qualified() + " is " +
                        std::string(to_string(bound.lhs.type)) + ", literal is " +
                        (literal.type() ? to_string(*literal.type()) : "null"));
      }
      if (bound.lhs.type == ValueType::Bool && is_order_op) {
        throw BindError("bool columns only support = and !=");
      }
      bound.rhs = literal;
    }
    return bound;
  }

  void bind_select_item(BoundQuery& q, const SelectItem& item) const {
    if (item.star && !item.agg) {
      for (std::size_t t = 0; t < tables_.size(); ++t) {
        for (const auto& attr : tables_[t].decl->attributes) {
          BoundSelectItem out;
          out.column = make_column(t, ColumnRef{std::nullopt, attr.name});
          out.output_name = attr.name;
          out.output_type = attr.type;
          q.items.push_back(std::move(out));
        }
      }
      return;
    }
    BoundSelectItem out;
    out.agg = item.agg;
    if (item.agg && item.star) {
      out.star_count = true;
      out.output_name = item.alias ? *item.alias : "COUNT(*)";
      out.output_type = ValueType::Int;
      q.items.push_back(std::move(out));
      return;
    }
    out.column = resolve(*item.column);
    if (item.agg) {
      bool numeric = out.column->type == ValueType::Int || out.column->type == ValueType::Float;
      if (!numeric && *item.agg != AggFn::Count && *item.agg != AggFn::Min &&
          *item.agg != AggFn::Max) {
        throw BindError(std::string(to_string(*item.agg)) + " requires a numeric column, " +
                        out.column->qualified() + " is " + to_string(out.column->type));
      }
      switch (*item.agg) {
        case AggFn::Count: out.output_type = ValueType::Int; break;
        case AggFn::Avg: out.output_type = ValueType::Float; break;
        case AggFn::Sum:
        case AggFn::Min:
        case AggFn::Max: out.output_type = out.column->type; break;
      }
      out.output_name = item.alias ? *item.alias
                                   : std::string(to_string(*item.agg)) + "(" +
                                         item.column->display() + ")";
    } else {
      out.output_type = out.column->type;
      out.output_name = item.alias ? *item.alias : out.column->attribute;
    }
    q.items.push_back(std::move(out));
  }

  BoundOrderItem bind_order_item(const BoundQuery& q, const OrderItem& item) const {
    BoundOrderItem bound;
    bound.descending = item.descending;

    // An unqualified name naming exactly one output column sorts the output.
    if (!item.column.qualifier) {
      std::optional<std::size_t> match;
      for (std::size_t i = 0; i < q.items.size(); ++i) {
        if (q.items[i].output_name == item.column.name) {
          if (match) throw BindError("ambiguous ORDER BY column: " + item.column.name);
          match = i;
        }
      }
      if (match) {
        bound.output_index = match;
        return bound;
      }
    }

    BoundColumn col = resolve(item.column);
    if (q.has_aggregates() || q.distinct) {
      // Row identity changes above the projection, so the key must be an
      // output column.
      for (std::size_t i = 0; i < q.items.size(); ++i) {
        if (!q.items[i].agg && q.items[i].column && *q.items[i].column == col) {
          bound.output_index = i;
          return bound;
        }
      }
      throw BindError("ORDER BY " + item.column.display() +
                      " must appear in the select list of an aggregate or DISTINCT query");
    }
    bound.column = col;
    return bound;
  }

  const QueryAst& ast_;
  const Catalog& catalog_;
  std::vector<BoundTable> tables_;
};

}  // namespace

std::string BoundPredicate::display() const {
  return lhs.qualified() + " " + to_symbol(op) + " " + render_rhs(*this);
}

bool BoundQuery::has_aggregates() const {
  for (const auto& item : items) {
    if (item.agg) return true;
  }
  return false;
}

std::vector<Column> BoundQuery::output_columns() const {
  std::vector<Column> columns;
  columns.reserve(items.size());
  for (const auto& item : items) {
    columns.push_back({item.output_name, item.output_type});
  }
  return columns;
}

BoundQuery bind(const QueryAst& ast, const Catalog& catalog) {
  Binder binder(ast, catalog);
  return binder.run();
}

}  // namespace galois::sql

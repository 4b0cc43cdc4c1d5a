#include "galois/planner.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <type_traits>

#include "galois/errors.hpp"
#include "galois/logging.hpp"

namespace galois::plan {

namespace {

using sql::BoundColumn;
using sql::BoundPredicate;
using sql::BoundQuery;

using AttrUse = std::pair<std::size_t, std::string>;

std::unique_ptr<LogicalNode> logical(LogicalOp op) {
  auto node = std::make_unique<LogicalNode>();
  node->op = op;
  return node;
}

std::unique_ptr<PhysicalNode> physical(PhysicalOp op) {
  auto node = std::make_unique<PhysicalNode>();
  node->op = op;
  return node;
}

bool single_table(const BoundPredicate& pred) {
  return !pred.rhs_is_column() || pred.rhs_column().table == pred.lhs.table;
}

// One per-table pipeline of Scan, FetchAttr, and Filter nodes.
struct Chain {
  Chain(const BoundQuery& q, std::size_t t) : query(q), table(t) {
    node = logical(LogicalOp::Scan);
    node->table = t;
    const RelationDecl* decl = q.tables[t].decl;
    if (decl->is_llm()) {
      available.insert(decl->key);
    } else {
      for (const auto& attr : decl->attributes) available.insert(attr.name);
    }
  }

  void ensure(const std::string& attribute) {
    if (available.count(attribute)) return;
    auto fetch = logical(LogicalOp::FetchAttr);
    fetch->table = table;
    fetch->attribute = attribute;
    fetch->children.push_back(std::move(node));
    node = std::move(fetch);
    available.insert(attribute);
  }

  void filter(const BoundPredicate& pred) {
    ensure(pred.lhs.attribute);
    if (pred.rhs_is_column()) ensure(pred.rhs_column().attribute);
    auto f = logical(LogicalOp::Filter);
    f->predicate = pred;
    f->children.push_back(std::move(node));
    node = std::move(f);
  }

  const BoundQuery& query;
  std::size_t table;
  std::unique_ptr<LogicalNode> node;
  std::set<std::string> available;
};

// Attribute references that keep a FetchAttr alive: everything the final
// projection, grouping, and sorting read, plus predicates that evaluate
// locally. Fused scan predicates and ask-mode filters do not count.
void collect_query_uses(const BoundQuery& q, std::set<AttrUse>& uses) {
  for (const auto& item : q.items) {
    if (item.column) uses.insert({item.column->table, item.column->attribute});
  }
  for (const auto& col : q.group_by) uses.insert({col.table, col.attribute});
  for (const auto& item : q.order_by) {
    if (item.column) uses.insert({item.column->table, item.column->attribute});
  }
}

void collect_tree_uses(const LogicalNode& node,
                       const std::set<const LogicalNode*>& excluded_filters,
                       std::set<AttrUse>& uses) {
  if (node.op == LogicalOp::Filter && !excluded_filters.count(&node)) {
    const auto& pred = *node.predicate;
    uses.insert({pred.lhs.table, pred.lhs.attribute});
    if (pred.rhs_is_column()) {
      uses.insert({pred.rhs_column().table, pred.rhs_column().attribute});
    }
  }
  if (node.op == LogicalOp::Join) {
    for (const auto& pred : node.conditions) {
      uses.insert({pred.lhs.table, pred.lhs.attribute});
      uses.insert({pred.rhs_column().table, pred.rhs_column().attribute});
    }
  }
  if (node.op == LogicalOp::Sort) {
    for (const auto& key : node.sort_keys) {
      if (key.column) uses.insert({key.column->table, key.column->attribute});
    }
  }
  for (const auto& child : node.children) {
    collect_tree_uses(*child, excluded_filters, uses);
  }
}

void walk(const LogicalNode& node, const std::function<void(const LogicalNode&)>& fn) {
  fn(node);
  for (const auto& child : node.children) walk(*child, fn);
}

std::string sort_key_display(const SortKey& key, const BoundQuery& q) {
  std::string out = key.column ? key.column->qualified()
                               : q.items[*key.output_index].output_name;
  if (key.descending) out += " DESC";
  return out;
}

template <typename Node>
std::string node_label(const Node& node, const char* op_name, const BoundQuery& q) {
  std::string label = op_name;
  auto scan_target = [&] {
    const auto& table = q.tables[node.table];
    std::string out = table.decl->name;
    if (table.effective_name != table.decl->name) out += " AS " + table.effective_name;
    return out;
  };
  if (label == "Scan" || label == "LlmScan" || label == "LocalScan") {
    label += "(" + scan_target();
    if (node.predicate) label += ", fused: " + node.predicate->display();
    label += ")";
  } else if (label == "FetchAttr" || label == "LlmFetch") {
    label += "(" + q.tables[node.table].effective_name + "." + node.attribute + ")";
  } else if (label == "Filter" || label == "LlmFilter" || label == "LocalFilter") {
    label += "(" + node.predicate->display() + ")";
  } else if (label == "Join" || label == "LocalJoin") {
    if (node.conditions.empty()) {
      label += "(cartesian)";
    } else {
      label += "(";
      for (std::size_t i = 0; i < node.conditions.size(); ++i) {
        if (i) label += " AND ";
        label += node.conditions[i].display();
      }
      label += ")";
    }
  } else if (label == "Aggregate" || label == "LocalAggregate") {
    label += "(";
    if (!q.group_by.empty()) {
      label += "groups: ";
      for (std::size_t i = 0; i < q.group_by.size(); ++i) {
        if (i) label += ", ";
        label += q.group_by[i].qualified();
      }
      label += "; ";
    }
    label += "out: ";
    for (std::size_t i = 0; i < q.items.size(); ++i) {
      if (i) label += ", ";
      label += q.items[i].output_name;
    }
    label += ")";
  } else if (label == "Project" || label == "LocalProject") {
    label += "(";
    for (std::size_t i = 0; i < q.items.size(); ++i) {
      if (i) label += ", ";
      label += q.items[i].output_name;
    }
    label += ")";
  } else if (label == "Sort" || label == "LocalSort") {
    label += "(";
    for (std::size_t i = 0; i < node.sort_keys.size(); ++i) {
      if (i) label += ", ";
      label += sort_key_display(node.sort_keys[i], q);
    }
    label += ")";
  } else if (label == "Limit" || label == "LocalLimit") {
    label += "(" + std::to_string(node.limit) + ")";
  }
  return label;
}

template <typename Node>
void render_tree(const Node& node, const BoundQuery& q, int depth, std::string& out) {
  out.append(static_cast<std::size_t>(depth) * 2, ' ');
  out += node_label(node, to_string(node.op), q);
  out += '\n';
  for (const auto& child : node.children) render_tree(*child, q, depth + 1, out);
}

}  // namespace

const char* to_string(LogicalOp op) {
  switch (op) {
    case LogicalOp::Scan: return "Scan";
    case LogicalOp::FetchAttr: return "FetchAttr";
    case LogicalOp::Filter: return "Filter";
    case LogicalOp::Join: return "Join";
    case LogicalOp::Aggregate: return "Aggregate";
    case LogicalOp::Project: return "Project";
    case LogicalOp::Distinct: return "Distinct";
    case LogicalOp::Sort: return "Sort";
    case LogicalOp::Limit: return "Limit";
  }
  return "Scan";
}

const char* to_string(PhysicalOp op) {
  switch (op) {
    case PhysicalOp::LlmScan: return "LlmScan";
    case PhysicalOp::LlmFetch: return "LlmFetch";
    case PhysicalOp::LlmFilter: return "LlmFilter";
    case PhysicalOp::LocalScan: return "LocalScan";
    case PhysicalOp::LocalFilter: return "LocalFilter";
    case PhysicalOp::LocalJoin: return "LocalJoin";
    case PhysicalOp::LocalAggregate: return "LocalAggregate";
    case PhysicalOp::LocalProject: return "LocalProject";
    case PhysicalOp::LocalDistinct: return "LocalDistinct";
    case PhysicalOp::LocalSort: return "LocalSort";
    case PhysicalOp::LocalLimit: return "LocalLimit";
  }
  return "LocalScan";
}

LogicalPlan build_logical_plan(BoundQuery query) {
  auto shared = std::make_shared<const BoundQuery>(std::move(query));
  const BoundQuery& q = *shared;
  if (q.tables.empty()) throw PlanError("query binds no tables");

  std::vector<Chain> chains;
  chains.reserve(q.tables.size());
  for (std::size_t t = 0; t < q.tables.size(); ++t) chains.emplace_back(q, t);

  std::vector<const BoundPredicate*> cross_eq;
  std::vector<const BoundPredicate*> cross_other;
  for (const auto& pred : q.predicates) {
    if (single_table(pred)) {
      chains[pred.lhs.table].filter(pred);
    } else if (pred.op == sql::CompareOp::Eq) {
      cross_eq.push_back(&pred);
    } else {
      cross_other.push_back(&pred);
    }
  }

  // Fetches for everything referenced above the per-table chains. Join
  // condition attributes come first so they sit lowest.
  auto ensure_cross = [&](const BoundPredicate& pred) {
    chains[pred.lhs.table].ensure(pred.lhs.attribute);
    chains[pred.rhs_column().table].ensure(pred.rhs_column().attribute);
  };
  for (const auto* pred : cross_eq) ensure_cross(*pred);
  for (const auto* pred : cross_other) ensure_cross(*pred);
  for (const auto& item : q.items) {
    if (item.column) chains[item.column->table].ensure(item.column->attribute);
  }
  for (const auto& col : q.group_by) chains[col.table].ensure(col.attribute);
  for (const auto& item : q.order_by) {
    if (item.column) chains[item.column->table].ensure(item.column->attribute);
  }

  std::unique_ptr<LogicalNode> current = std::move(chains[0].node);
  std::set<std::size_t> joined = {0};
  std::vector<bool> eq_used(cross_eq.size(), false);
  std::vector<bool> other_used(cross_other.size(), false);

  auto both_joined = [&](const BoundPredicate& pred) {
    return joined.count(pred.lhs.table) && joined.count(pred.rhs_column().table);
  };

  for (std::size_t t = 1; t < q.tables.size(); ++t) {
    auto join = logical(LogicalOp::Join);
    for (std::size_t i = 0; i < cross_eq.size(); ++i) {
      if (eq_used[i]) continue;
      const BoundPredicate& pred = *cross_eq[i];
      std::size_t a = pred.lhs.table;
      std::size_t b = pred.rhs_column().table;
      if ((joined.count(a) && b == t) || (joined.count(b) && a == t)) {
        join->conditions.push_back(pred);
        eq_used[i] = true;
      }
    }
    if (join->conditions.empty()) {
      log::warn("no join condition between " + q.tables[t].effective_name +
                " and the tables before it; building a cross product");
    }
    join->children.push_back(std::move(current));
    join->children.push_back(std::move(chains[t].node));
    current = std::move(join);
    joined.insert(t);

    auto add_filter = [&](const BoundPredicate& pred) {
      auto f = logical(LogicalOp::Filter);
      f->predicate = pred;
      f->children.push_back(std::move(current));
      current = std::move(f);
    };
    for (std::size_t i = 0; i < cross_other.size(); ++i) {
      if (!other_used[i] && both_joined(*cross_other[i])) {
        add_filter(*cross_other[i]);
        other_used[i] = true;
      }
    }
    // Equality over two already-joined tables (a cycle edge) filters here.
    for (std::size_t i = 0; i < cross_eq.size(); ++i) {
      if (!eq_used[i] && both_joined(*cross_eq[i])) {
        add_filter(*cross_eq[i]);
        eq_used[i] = true;
      }
    }
  }

  bool sort_below_project = false;
  if (q.has_aggregates()) {
    auto agg = logical(LogicalOp::Aggregate);
    agg->children.push_back(std::move(current));
    current = std::move(agg);
  } else {
    sort_below_project =
        !q.distinct && std::any_of(q.order_by.begin(), q.order_by.end(),
                                   [](const auto& item) { return item.column.has_value(); });
    if (sort_below_project) {
      auto sort = logical(LogicalOp::Sort);
      for (const auto& item : q.order_by) {
        SortKey key;
        key.descending = item.descending;
        // Keys naming projected columns sort by the source column; without
        // aggregates the two are the same value.
        key.column = item.column ? *item.column : *q.items[*item.output_index].column;
        sort->sort_keys.push_back(std::move(key));
      }
      sort->children.push_back(std::move(current));
      current = std::move(sort);
    }
    auto project = logical(LogicalOp::Project);
    project->children.push_back(std::move(current));
    current = std::move(project);
  }

  if (q.distinct) {
    auto distinct = logical(LogicalOp::Distinct);
    distinct->children.push_back(std::move(current));
    current = std::move(distinct);
  }
  if (!q.order_by.empty() && !sort_below_project) {
    auto sort = logical(LogicalOp::Sort);
    for (const auto& item : q.order_by) {
      SortKey key;
      key.descending = item.descending;
      key.output_index = item.output_index;
      sort->sort_keys.push_back(key);
    }
    sort->children.push_back(std::move(current));
    current = std::move(sort);
  }
  if (q.limit) {
    auto limit = logical(LogicalOp::Limit);
    limit->limit = *q.limit;
    limit->children.push_back(std::move(current));
    current = std::move(limit);
  }

  LogicalPlan plan;
  plan.query = shared;
  plan.root = std::move(current);
  return plan;
}

namespace {

// Phase one of pushdown: move one eligible literal filter per scan into the
// scan node and cut the filter out of the tree.
std::unique_ptr<LogicalNode> fuse_filters(std::unique_ptr<LogicalNode> node,
                                          const BoundQuery& q) {
  for (auto& child : node->children) child = fuse_filters(std::move(child), q);
  if (node->op != LogicalOp::Filter) return node;
  const BoundPredicate& pred = *node->predicate;
  if (pred.rhs_is_column()) return node;
  std::size_t t = pred.lhs.table;
  if (!q.tables[t].decl->is_llm()) return node;

  LogicalNode* cursor = node->children[0].get();
  while (cursor->op == LogicalOp::FetchAttr && cursor->table == t) {
    cursor = cursor->children[0].get();
  }
  if (cursor->op != LogicalOp::Scan || cursor->table != t || cursor->predicate) return node;
  cursor->predicate = pred;
  return std::move(node->children[0]);
}

// Phase two: drop FetchAttr nodes whose attribute nothing references anymore.
std::unique_ptr<LogicalNode> prune_fetches(std::unique_ptr<LogicalNode> node,
                                           const std::set<AttrUse>& uses) {
  for (auto& child : node->children) child = prune_fetches(std::move(child), uses);
  if (node->op == LogicalOp::FetchAttr && !uses.count({node->table, node->attribute})) {
    return std::move(node->children[0]);
  }
  return node;
}

}  // namespace

LogicalPlan push_down_selections(LogicalPlan plan) {
  const BoundQuery& q = *plan.query;
  plan.root = fuse_filters(std::move(plan.root), q);
  std::set<AttrUse> uses;
  collect_query_uses(q, uses);
  collect_tree_uses(*plan.root, {}, uses);
  plan.root = prune_fetches(std::move(plan.root), uses);
  return plan;
}

namespace {

struct LoweringDecisions {
  std::set<const LogicalNode*> ask_filters;
  std::set<AttrUse> kept_uses;  // attributes whose fetches must survive
};

LoweringDecisions decide_filters(const LogicalPlan& plan, FilterMode mode) {
  const BoundQuery& q = *plan.query;
  LoweringDecisions decisions;

  std::vector<const LogicalNode*> candidates;
  walk(*plan.root, [&](const LogicalNode& node) {
    if (node.op != LogicalOp::Filter) return;
    const BoundPredicate& pred = *node.predicate;
    if (pred.rhs_is_column()) return;
    const RelationDecl* decl = q.tables[pred.lhs.table].decl;
    if (!decl->is_llm() || pred.lhs.attribute == decl->key) return;
    candidates.push_back(&node);
  });

  switch (mode) {
    case FilterMode::Fetch:
      break;
    case FilterMode::Ask:
      decisions.ask_filters.insert(candidates.begin(), candidates.end());
      break;
    case FilterMode::Auto: {
      std::set<const LogicalNode*> excluded(candidates.begin(), candidates.end());
      std::set<AttrUse> uses;
      collect_query_uses(q, uses);
      collect_tree_uses(*plan.root, excluded, uses);
      for (const LogicalNode* node : candidates) {
        const BoundPredicate& pred = *node->predicate;
        if (!uses.count({pred.lhs.table, pred.lhs.attribute})) {
          decisions.ask_filters.insert(node);
        }
      }
      break;
    }
  }

  collect_query_uses(q, decisions.kept_uses);
  collect_tree_uses(*plan.root, decisions.ask_filters, decisions.kept_uses);
  return decisions;
}

std::unique_ptr<PhysicalNode> lower_node(const LogicalNode& node, const BoundQuery& q,
                                         const LoweringDecisions& decisions) {
  switch (node.op) {
    case LogicalOp::Scan: {
      const RelationDecl* decl = q.tables[node.table].decl;
      if (decl->is_llm()) {
        auto scan = physical(PhysicalOp::LlmScan);
        scan->table = node.table;
        scan->predicate = node.predicate;
        return scan;
      }
      auto scan = physical(PhysicalOp::LocalScan);
      scan->table = node.table;
      if (!node.predicate) return scan;
      auto filter = physical(PhysicalOp::LocalFilter);
      filter->predicate = node.predicate;
      filter->children.push_back(std::move(scan));
      return filter;
    }
    case LogicalOp::FetchAttr: {
      if (!decisions.kept_uses.count({node.table, node.attribute})) {
        return lower_node(*node.children[0], q, decisions);
      }
      const RelationDecl* decl = q.tables[node.table].decl;
      if (!decl->is_llm()) {
        throw PlanError("cannot fetch attribute " + node.attribute + " of local relation " +
                        decl->name);
      }
      auto fetch = physical(PhysicalOp::LlmFetch);
      fetch->table = node.table;
      fetch->attribute = node.attribute;
      fetch->children.push_back(lower_node(*node.children[0], q, decisions));
      return fetch;
    }
    case LogicalOp::Filter: {
      bool ask = decisions.ask_filters.count(&node) > 0;
      auto filter = physical(ask ? PhysicalOp::LlmFilter : PhysicalOp::LocalFilter);
      filter->predicate = node.predicate;
      if (ask) filter->table = node.predicate->lhs.table;
      filter->children.push_back(lower_node(*node.children[0], q, decisions));
      return filter;
    }
    case LogicalOp::Join: {
      auto join = physical(PhysicalOp::LocalJoin);
      join->conditions = node.conditions;
      join->children.push_back(lower_node(*node.children[0], q, decisions));
      join->children.push_back(lower_node(*node.children[1], q, decisions));
      return join;
    }
    case LogicalOp::Aggregate: {
      auto agg = physical(PhysicalOp::LocalAggregate);
      agg->children.push_back(lower_node(*node.children[0], q, decisions));
      return agg;
    }
    case LogicalOp::Project: {
      auto project = physical(PhysicalOp::LocalProject);
      project->children.push_back(lower_node(*node.children[0], q, decisions));
      return project;
    }
    case LogicalOp::Distinct: {
      auto distinct = physical(PhysicalOp::LocalDistinct);
      distinct->children.push_back(lower_node(*node.children[0], q, decisions));
      return distinct;
    }
    case LogicalOp::Sort: {
      auto sort = physical(PhysicalOp::LocalSort);
      sort->sort_keys = node.sort_keys;
      sort->children.push_back(lower_node(*node.children[0], q, decisions));
      return sort;
    }
    case LogicalOp::Limit: {
      auto limit = physical(PhysicalOp::LocalLimit);
      limit->limit = node.limit;
      limit->children.push_back(lower_node(*node.children[0], q, decisions));
      return limit;
    }
  }
  throw PlanError("unknown logical operator");
}

void check_physical(const PhysicalNode& node, const BoundQuery& q) {
  bool model_backed = node.op == PhysicalOp::LlmScan || node.op == PhysicalOp::LlmFetch ||
                      node.op == PhysicalOp::LlmFilter;
  if (model_backed && !q.tables[node.table].decl->is_llm()) {
    throw PlanError("model operator over local relation " + q.tables[node.table].decl->name);
  }
  for (const auto& child : node.children) check_physical(*child, q);
}

}  // namespace

PhysicalPlan lower_to_physical(const LogicalPlan& plan, const Catalog& catalog,
                               FilterMode mode) {
  (void)catalog;  // tables were resolved at bind time against the same catalog
  LoweringDecisions decisions = decide_filters(plan, mode);
  PhysicalPlan out;
  out.query = plan.query;
  out.root = lower_node(*plan.root, *plan.query, decisions);
  check_physical(*out.root, *plan.query);
  return out;
}

std::string explain(const LogicalPlan& plan) {
  std::string out;
  render_tree(*plan.root, *plan.query, 0, out);
  return out;
}

std::string explain(const PhysicalPlan& plan) {
  std::string out;
  render_tree(*plan.root, *plan.query, 0, out);
  return out;
}

}  // namespace galois::plan

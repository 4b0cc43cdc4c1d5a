#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "galois/catalog.hpp"
#include "galois/sql_binder.hpp"

namespace galois::plan {

inline constexpr std::size_t npos = static_cast<std::size_t>(-1);

enum class LogicalOp {
  Scan,       // emit the key column of one table (all columns for local tables)
  FetchAttr,  // add one attribute column, one prompt per distinct key
  Filter,
  Join,
  Aggregate,
  Project,
  Distinct,
  Sort,
  Limit,
};

enum class PhysicalOp {
  LlmScan,
  LlmFetch,
  LlmFilter,
  LocalScan,
  LocalFilter,
  LocalJoin,
  LocalAggregate,
  LocalProject,
  LocalDistinct,
  LocalSort,
  LocalLimit,
};

const char* to_string(LogicalOp op);
const char* to_string(PhysicalOp op);

// Sort key: either a projected output column (by position) or a source
// column for sorts placed below the projection.
struct SortKey {
  std::optional<std::size_t> output_index;
  std::optional<sql::BoundColumn> column;
  bool descending = false;
};

// One struct per tree; the operator kind decides which fields are live.
struct LogicalNode {
  LogicalOp op = LogicalOp::Scan;
  std::vector<std::unique_ptr<LogicalNode>> children;

  std::size_t table = npos;                      // Scan, FetchAttr
  std::string attribute;                         // FetchAttr
  std::optional<sql::BoundPredicate> predicate;  // Filter; fused scan predicate
  std::vector<sql::BoundPredicate> conditions;   // Join (equalities; empty = cartesian)
  std::vector<SortKey> sort_keys;                // Sort
  std::int64_t limit = 0;                        // Limit
};

struct PhysicalNode {
  PhysicalOp op = PhysicalOp::LocalScan;
  std::vector<std::unique_ptr<PhysicalNode>> children;

  std::size_t table = npos;
  std::string attribute;
  std::optional<sql::BoundPredicate> predicate;
  std::vector<sql::BoundPredicate> conditions;
  std::vector<SortKey> sort_keys;
  std::int64_t limit = 0;
};

struct LogicalPlan {
  std::shared_ptr<const sql::BoundQuery> query;
  std::unique_ptr<LogicalNode> root;
};

struct PhysicalPlan {
  std::shared_ptr<const sql::BoundQuery> query;
  std::unique_ptr<PhysicalNode> root;
};

// How filters over model-backed attributes lower:
//  Fetch: always fetch the attribute, filter locally.
//  Ask:   one yes/no prompt per key, no fetch for filter-only attributes.
//  Auto:  ask when the attribute is referenced nowhere else, fetch otherwise.
enum class FilterMode { Auto, Fetch, Ask };

// Canonical shape: per-table chains of Scan, FetchAttr, Filter in WHERE
// order, joined left to right in FROM order with equality conditions at
// the join that first sees both sides, then Aggregate or Project,
// Distinct, Sort, Limit. FetchAttr appears at the lowest point where an
// operator first references the attribute; local tables never fetch.
LogicalPlan build_logical_plan(sql::BoundQuery query);

// Fuses at most one literal filter per model-backed scan into the scan
// prompt when only FetchAttr nodes of the same table separate them, then
// drops the fetch if nothing else references the attribute.
LogicalPlan push_down_selections(LogicalPlan plan);

// Maps operators onto backend-facing and local implementations and applies
// the filter mode. Throws PlanError if lowering would prompt a local table.
PhysicalPlan lower_to_physical(const LogicalPlan& plan, const Catalog& catalog,
                               FilterMode mode = FilterMode::Auto);

// Indented operator trees, one node per line, two spaces per level.
std::string explain(const LogicalPlan& plan);
std::string explain(const PhysicalPlan& plan);

}  // namespace galois::plan

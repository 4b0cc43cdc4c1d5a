#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "galois/backend.hpp"
#include "galois/catalog.hpp"
#include "galois/executor.hpp"
#include "galois/fact_store.hpp"
#include "galois/planner.hpp"
#include "galois/prompt.hpp"
#include "galois/relation.hpp"
#include "galois/sql_binder.hpp"

namespace galois::harness {

enum class QueryClass { SelectionOnly, Aggregate, Join, Other };

const char* to_string(QueryClass qc);
QueryClass parse_query_class(std::string_view name);

enum class RunMode { Sql, Nl, NlCot };

const char* to_string(RunMode mode);
std::optional<RunMode> parse_run_mode(std::string_view name);

struct QueryCase {
  std::string id;
  std::string sql;
  std::string nl_question;  // empty when the case has no baseline question
  QueryClass query_class = QueryClass::Other;
  // Literal ground-truth rows (raw strings, one per output column). When
  // absent the reference evaluator computes the truth from the fact store.
  std::optional<std::vector<std::vector<std::string>>> expected;
};

struct Suite {
  std::string name;
  std::filesystem::path dir;
  Catalog catalog;
  backend::FactStore facts;
  std::vector<QueryCase> cases;
};

// Reads catalog.json, facts.json, and cases.json from the directory.
// Validates shape and the facts/catalog cross-references; the SQL of each
// case is checked lazily so one bad case cannot block a whole benchmark.
Suite load_suite(const std::filesystem::path& dir);

// Materializes one declared relation as a table: fact-store keys and cells
// for model-backed sources, the CSV file for local ones. Columns are named
// "<prefix>.<attribute>". Cell strings parse strictly; a value the strict
// parser rejects is a fixture bug and throws ValidationError.
Relation fact_store_table(const RelationDecl& relation, const backend::FactStore& facts,
                          const std::string& prefix);

// Reference evaluator: product of the FROM tables, every predicate applied
// as a plain typed comparison, then aggregate/distinct/sort/limit straight
// off the bound query. Written independently of the executor; agreement
// between the two on zero noise is the central oracle.
Relation naive_local_eval(const sql::BoundQuery& query, const backend::FactStore& facts);

// f = 2 n_D / (n_D + n_M); 1 when the sizes agree, > 1 when the engine
// under-returns. Both sizes zero is undefined and throws ValidationError;
// report code excludes such cases instead of calling.
double cardinality_ratio(std::size_t n_d, std::size_t n_m);

// 100 x mean(1 - f) over cases with n_D + n_M > 0, negative when the engine
// under-returns on average. Throws ValidationError when every case is
// excluded.
double cardinality_report(const std::vector<std::pair<std::size_t, std::size_t>>& counts);

struct CellMatch {
  double percent = 100.0;      // 100 x matched / total; 100 when total is 0
  std::size_t matched = 0;     // ground-truth cells matched by an aligned row
  std::size_t total = 0;       // ground-truth cells
  std::size_t spurious_rows = 0;  // engine rows aligned to no truth row
};

// Aligns tuples by normalized key equality (trimmed, case-folded text;
// numerics by value) when key_column is set, positionally otherwise.
// Unmatched truth tuples count every cell as a miss. A numeric cell matches
// within relative tolerance; text matches after trim and case fold; Null
// matches only Null. Extra engine rows never add matches. Throws
// ValidationError when the schemas differ.
CellMatch cell_match_score(const Relation& engine, const Relation& truth,
                           std::optional<std::size_t> key_column, double tolerance = 0.05);

struct CaseResult {
  std::string id;
  QueryClass query_class = QueryClass::Other;
  RunMode mode = RunMode::Sql;
  bool failed = false;
  std::string error;
  std::size_t truth_rows = 0;
  std::size_t engine_rows = 0;
  std::optional<double> f;  // unset when both sides are empty or the case failed
  CellMatch cells;
  bool experimental = false;  // natural language modes: parse is best effort
  std::string raw_answer;     // natural language modes only
};

struct ModeSummary {
  RunMode mode = RunMode::Sql;
  std::size_t cases = 0;
  std::size_t failed = 0;
  std::size_t excluded = 0;    // empty-vs-empty cases, outside the f mean
  std::size_t near_empty = 0;  // f > 1.99: the engine returned almost nothing
  double one_minus_f_percent = 0;
  double cell_match_percent = 0;
  std::map<QueryClass, double> class_cell_match;
};

struct EvalReport {
  std::string suite;
  double tolerance = 0.05;
  std::vector<RunMode> modes;
  std::vector<CaseResult> cases;
  std::vector<ModeSummary> summaries;
  backend::StatsSnapshot stats;
};

struct BenchOptions {
  std::vector<RunMode> modes = {RunMode::Sql};
  bool optimize = false;
  plan::FilterMode filter_mode = plan::FilterMode::Auto;
  exec::ExecConfig exec;
  double tolerance = 0.05;
};

// Runs every case in every requested mode against the backend and scores it
// against the ground truth. Per-case errors are recorded, never thrown.
EvalReport run_benchmark(const Suite& suite, backend::Backend& backend,
                         const prompt::Compiler& compiler, const BenchOptions& options = {});

// Stable serialization: fixed key order, no timestamps or environment
// details, so identical runs serialize byte for byte.
std::string report_to_json(const EvalReport& report);

// Human-readable table plus one summary line per mode in the fixed form
// "1-f: +0.0%  cell-match: 100.0%".
std::string render_report_table(const EvalReport& report);

}  // namespace galois::harness

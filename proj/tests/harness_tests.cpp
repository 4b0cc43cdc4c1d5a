#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "galois/errors.hpp"
#include "galois/harness.hpp"
#include "galois/mock_backend.hpp"
#include "galois/sql_binder.hpp"

using namespace galois;
using namespace galois::harness;
using galois::backend::MockBackend;
using galois::backend::NoiseConfig;

namespace {

const std::filesystem::path kFixtures = GALOIS_FIXTURE_DIR;

Suite world_suite() { return load_suite(kFixtures / "suites" / "world"); }

Relation rel(std::vector<Column> columns, std::vector<std::vector<Cell>> rows) {
  Relation r = Relation::with_columns(std::move(columns));
  for (auto& row : rows) r.append_row(std::move(row));
  return r;
}

Relation naive(const Suite& suite, const char* text) {
  return naive_local_eval(sql::bind(sql::parse(text), suite.catalog), suite.facts);
}

}  // namespace

TEST_CASE("cardinality_ratio implements 2 n_d over n_d plus n_m") {
  CHECK(cardinality_ratio(3, 1) == 1.5);
  CHECK(cardinality_ratio(10, 10) == 1.0);
  CHECK(cardinality_ratio(10, 30) == 0.5);
  CHECK(cardinality_ratio(0, 5) == 0.0);
  CHECK(cardinality_ratio(5, 0) == 2.0);
  CHECK_THROWS_AS(cardinality_ratio(0, 0), ValidationError);
}

TEST_CASE("cardinality_report averages 1 - f as a percentage") {
  CHECK(cardinality_report({{3, 1}}) == -50.0);
  CHECK(cardinality_report({{10, 10}, {3, 1}}) == -25.0);
  CHECK(cardinality_report({{10, 30}}) == 50.0);
  // empty-vs-empty pairs are excluded from the mean
  CHECK(cardinality_report({{0, 0}, {10, 10}}) == 0.0);
  CHECK_THROWS_AS(cardinality_report({{0, 0}}), ValidationError);
  CHECK_THROWS_AS(cardinality_report({}), ValidationError);

  // the mean agrees with plainly restated arithmetic on synthetic vectors
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> vectors = {
      {{1, 1}}, {{1, 2}}, {{2, 1}}, {{4, 4}, {4, 0}},
      {{5, 3}, {3, 5}}, {{7, 7}, {7, 7}, {1, 3}},
      {{100, 1}}, {{1, 100}}, {{0, 7}, {9, 9}},
      {{12, 8}, {6, 14}, {10, 10}, {2, 2}},
  };
  for (const auto& counts : vectors) {
    double sum = 0;
    std::size_t included = 0;
    for (auto [nd, nm] : counts) {
      if (nd + nm == 0) continue;
      sum += 1.0 - (2.0 * static_cast<double>(nd)) / static_cast<double>(nd + nm);
      ++included;
    }
    double expected = 100.0 * sum / static_cast<double>(included);
    CHECK(std::abs(cardinality_report(counts) - expected) <= 1e-9);
  }
}

TEST_CASE("cell match aligns rows by key") {
  Relation truth = rel({{"name", ValueType::Text}, {"gdp", ValueType::Float}},
                       {{Cell::text("Italy"), Cell::real(2000.0)},
                        {Cell::text("France"), Cell::real(2780.0)}});
  Relation engine = rel({{"name", ValueType::Text}, {"gdp", ValueType::Float}},
                        {{Cell::text("France"), Cell::real(2780.0)},
                         {Cell::text("italy "), Cell::real(2080.0)}});

  CellMatch score = cell_match_score(engine, truth, 0);
  // 2080 versus 2000 is inside the 5% relative tolerance; keys fold case
  CHECK(score.matched == 4);
  CHECK(score.total == 4);
  CHECK(score.percent == 100.0);
  CHECK(score.spurious_rows == 0);

  // 2110 versus 2000 is 5.5% off: key row aligns, value cell misses
  engine.rows[1][1] = Cell::real(2110.0);
  score = cell_match_score(engine, truth, 0);
  CHECK(score.matched == 3);
  CHECK(score.percent == 75.0);
}

TEST_CASE("cell match counts unmatched truth rows and spurious engine rows") {
  Relation truth = rel({{"name", ValueType::Text}},
                       {{Cell::text("Rome")}, {Cell::text("Paris")}});
  Relation engine = rel({{"name", ValueType::Text}},
                        {{Cell::text("Rome")}, {Cell::text("Madrid")}});
  CellMatch score = cell_match_score(engine, truth, 0);
  CHECK(score.matched == 1);
  CHECK(score.total == 2);
  CHECK(score.percent == 50.0);
  CHECK(score.spurious_rows == 1);

  // an empty engine output matches nothing
  Relation empty = Relation::with_columns(truth.columns);
  score = cell_match_score(empty, truth, 0);
  CHECK(score.percent == 0.0);
  CHECK(score.spurious_rows == 0);

  // an empty truth is vacuously perfect
  score = cell_match_score(engine, Relation::with_columns(truth.columns), 0);
  CHECK(score.percent == 100.0);
  CHECK(score.total == 0);
  CHECK(score.spurious_rows == 2);
}

TEST_CASE("cell match alignment is greedy over duplicate keys") {
  Relation truth = rel({{"k", ValueType::Text}, {"v", ValueType::Int}},
                       {{Cell::text("a"), Cell::integer(1)},
                        {Cell::text("a"), Cell::integer(2)}});
  Relation engine = rel({{"k", ValueType::Text}, {"v", ValueType::Int}},
                        {{Cell::text("a"), Cell::integer(2)},
                         {Cell::text("a"), Cell::integer(1)}});
  // first truth row takes the first unused engine row with key "a"
  CellMatch score = cell_match_score(engine, truth, 0);
  CHECK(score.matched == 2);  // both keys match, both values cross-missed
  CHECK(score.total == 4);
}

TEST_CASE("cell match rules for nulls, zeros, and booleans") {
  auto columns = std::vector<Column>{{"v", ValueType::Float}};
  auto one = [&](Cell truth_cell, Cell engine_cell) {
    Relation truth = rel(columns, {{truth_cell}});
    Relation engine = rel(columns, {{engine_cell}});
    return cell_match_score(engine, truth, std::nullopt).matched == 1;
  };
  CHECK(one(Cell::null(), Cell::null()));
  CHECK_FALSE(one(Cell::null(), Cell::real(0.0)));
  CHECK_FALSE(one(Cell::real(0.0), Cell::null()));
  CHECK(one(Cell::real(0.0), Cell::real(0.0)));
  CHECK_FALSE(one(Cell::real(0.0), Cell::real(0.001)));  // zero tolerates nothing
  CHECK(one(Cell::real(100.0), Cell::real(104.9)));
  CHECK_FALSE(one(Cell::real(100.0), Cell::real(105.1)));
  CHECK(one(Cell::real(-100.0), Cell::real(-96.0)));
  CHECK(one(Cell::boolean(true), Cell::boolean(true)));
  CHECK_FALSE(one(Cell::boolean(true), Cell::boolean(false)));
  CHECK(one(Cell::text(" Rome "), Cell::text("ROME")));
  CHECK(one(Cell::integer(100), Cell::real(99.0)));  // numeric kinds mix
}

TEST_CASE("cell match requires identical schemas") {
  Relation a = rel({{"x", ValueType::Int}}, {});
  Relation b = rel({{"y", ValueType::Int}}, {});
  CHECK_THROWS_AS(cell_match_score(a, b, std::nullopt), ValidationError);
  Relation c = rel({{"x", ValueType::Float}}, {});
  CHECK_THROWS_AS(cell_match_score(a, c, std::nullopt), ValidationError);
  CHECK_THROWS_AS(cell_match_score(a, a, 3), ValidationError);  // key out of range
}

TEST_CASE("suites load with classes, questions, and literal truths") {
  Suite suite = world_suite();
  CHECK(suite.name == "world");
  CHECK(suite.cases.size() >= 20);
  CHECK_FALSE(suite.catalog.relations().empty());

  bool saw_nl = false;
  for (const auto& c : suite.cases) {
    CHECK_FALSE(c.id.empty());
    CHECK_FALSE(c.sql.empty());
    if (!c.nl_question.empty()) saw_nl = true;
  }
  CHECK(saw_nl);

  CHECK_THROWS_WITH_AS(load_suite(kFixtures / "suites" / "missing"),
                       doctest::Contains("cannot open file"), Error);
}

TEST_CASE("fact_store_table materializes llm and local relations") {
  Suite suite = world_suite();
  Relation country = fact_store_table(suite.catalog.resolve("country"),
                                      suite.facts, "country");
  REQUIRE(country.columns.size() == 5);
  CHECK(country.columns[0].name == "country.name");
  CHECK(country.rows.size() == 6);

  Relation employees = fact_store_table(suite.catalog.resolve("employees"),
                                        suite.facts, "e");
  CHECK(employees.columns[0].name == "e.id");
  CHECK(employees.rows.size() == 7);

  // a fixture value the strict parser rejects is an error, not a Null
  backend::FactStore broken = suite.facts;
  broken.cells["country"]["Italy"]["population"] = "lots";
  CHECK_THROWS_AS(fact_store_table(suite.catalog.resolve("country"), broken, "c"),
                  ValidationError);
}

TEST_CASE("naive evaluator handles selection, aggregation, join, distinct") {
  Suite suite = world_suite();

  CHECK(naive(suite, "SELECT name FROM city WHERE is_capital = TRUE") ==
        rel({{"name", ValueType::Text}},
            {{Cell::text("Nairobi")},
             {Cell::text("Paris")},
             {Cell::text("Rome")},
             {Cell::text("Tokyo")}}));

  CHECK(naive(suite, "SELECT COUNT(*) FROM city") ==
        rel({{"COUNT(*)", ValueType::Int}}, {{Cell::integer(6)}}));

  CHECK(naive(suite,
              "SELECT c.continent, COUNT(*) FROM city ci, country c "
              "WHERE ci.country = c.name GROUP BY c.continent ORDER BY c.continent") ==
        rel({{"continent", ValueType::Text}, {"COUNT(*)", ValueType::Int}},
            {{Cell::text("Africa"), Cell::integer(1)},
             {Cell::text("Asia"), Cell::integer(2)},
             {Cell::text("Europe"), Cell::integer(2)},
             {Cell::text("Oceania"), Cell::integer(1)}}));

  CHECK(naive(suite, "SELECT DISTINCT country FROM city ORDER BY country DESC LIMIT 2") ==
        rel({{"country", ValueType::Text}},
            {{Cell::text("Kenya")}, {Cell::text("Japan")}}));

  CHECK(naive(suite, "SELECT AVG(salary) FROM employees WHERE country = 'Italy'") ==
        rel({{"AVG(salary)", ValueType::Float}}, {{Cell::real(65000.0)}}));

  // empty group-by input yields one row, like the executor
  Relation empty_agg = naive(suite, "SELECT COUNT(*) FROM city WHERE population > 99000000");
  CHECK(empty_agg == rel({{"COUNT(*)", ValueType::Int}}, {{Cell::integer(0)}}));
}

TEST_CASE("zero noise benchmark is perfect by construction") {
  Suite suite = world_suite();
  MockBackend backend(suite.facts, NoiseConfig{});
  prompt::Compiler compiler(prompt::TemplateSet::default_set());

  EvalReport report = run_benchmark(suite, backend, compiler);
  REQUIRE(report.summaries.size() == 1);
  const ModeSummary& summary = report.summaries[0];
  CHECK(summary.mode == RunMode::Sql);
  CHECK(summary.cases == suite.cases.size());
  CHECK(summary.failed == 0);
  CHECK(summary.excluded == 1);  // the deliberately empty result case
  CHECK(summary.near_empty == 0);
  CHECK(summary.one_minus_f_percent == 0.0);
  CHECK(summary.cell_match_percent == 100.0);
  for (const auto& [qc, percent] : summary.class_cell_match) {
    CHECK(percent == 100.0);
  }
  for (const auto& result : report.cases) {
    INFO("case: " << result.id);
    CHECK_FALSE(result.failed);
    CHECK(result.cells.spurious_rows == 0);
  }
  CHECK(report.stats.calls > 0);

  std::string table = render_report_table(report);
  CHECK(table.find("1-f: +0.0%  cell-match: 100.0%") != std::string::npos);
}

TEST_CASE("report json is stable and carries per-case scores") {
  Suite suite = world_suite();
  prompt::Compiler compiler(prompt::TemplateSet::default_set());

  MockBackend first(suite.facts, NoiseConfig{});
  EvalReport a = run_benchmark(suite, first, compiler);
  MockBackend second(suite.facts, NoiseConfig{});
  EvalReport b = run_benchmark(suite, second, compiler);
  CHECK(report_to_json(a) == report_to_json(b));

  std::string json = report_to_json(a);
  CHECK(json.find("\"suite\": \"world\"") != std::string::npos);
  CHECK(json.find("\"one_minus_f_percent\"") != std::string::npos);
  CHECK(json.find("\"cell_match\"") != std::string::npos);
}

TEST_CASE("literal expected rows replace the computed truth") {
  Suite suite = world_suite();
  QueryCase qc;
  qc.id = "pinned";
  qc.sql = "SELECT name, population FROM city WHERE name = 'Rome'";
  qc.query_class = QueryClass::SelectionOnly;
  qc.expected = {{{"Rome", "2800000"}}};
  suite.cases = {qc};

  MockBackend backend(suite.facts, NoiseConfig{});
  prompt::Compiler compiler(prompt::TemplateSet::default_set());
  EvalReport report = run_benchmark(suite, backend, compiler);
  REQUIRE(report.cases.size() == 1);
  CHECK_FALSE(report.cases[0].failed);
  CHECK(report.cases[0].cells.percent == 100.0);
  CHECK(report.cases[0].truth_rows == 1);

  // a wrong-arity expected row fails that case alone
  suite.cases[0].expected = {{{"Rome"}}};
  MockBackend second(suite.facts, NoiseConfig{});
  EvalReport bad = run_benchmark(suite, second, compiler);
  CHECK(bad.cases[0].failed);
  CHECK(bad.cases[0].error.find("expected row") != std::string::npos);
}

TEST_CASE("benchmark records failures without aborting the run") {
  Suite suite = world_suite();
  suite.cases[0].sql = "SELECT nonsense FROM nowhere";
  MockBackend backend(suite.facts, NoiseConfig{});
  prompt::Compiler compiler(prompt::TemplateSet::default_set());

  EvalReport report = run_benchmark(suite, backend, compiler);
  CHECK(report.summaries[0].failed == 1);
  REQUIRE_FALSE(report.cases.empty());
  CHECK(report.cases[0].failed);
  CHECK_FALSE(report.cases[0].error.empty());
  // the other cases still scored
  CHECK(report.summaries[0].cases == suite.cases.size());
  CHECK(report.summaries[0].cell_match_percent < 100.0 + 1e-9);
}

TEST_CASE("nl mode scores against flattened truth and keeps the raw answer") {
  Suite suite = world_suite();
  MockBackend backend(suite.facts, NoiseConfig{});
  prompt::Compiler compiler(prompt::TemplateSet::default_set());

  BenchOptions options;
  options.modes = {RunMode::Nl};
  EvalReport report = run_benchmark(suite, backend, compiler, options);

  std::size_t with_questions = 0;
  for (const auto& result : report.cases) {
    if (result.failed) continue;
    ++with_questions;
    CHECK(result.experimental);
    CHECK_FALSE(result.raw_answer.empty());
  }
  CHECK(with_questions >= 4);

  // capitals: the qa answer lists exactly the four capitals, so it scores 100
  for (const auto& result : report.cases) {
    if (result.id == "capitals") {
      CHECK_FALSE(result.failed);
      CHECK(result.cells.percent == 100.0);
      CHECK(result.truth_rows == 4);
      CHECK(result.engine_rows == 4);
    }
    if (result.id == "all_countries") {
      // no nl question recorded for this case
      CHECK(result.failed);
    }
  }
}

TEST_CASE("query classes and run modes parse and print") {
  CHECK(parse_query_class("selection-only") == QueryClass::SelectionOnly);
  CHECK(parse_query_class("aggregate") == QueryClass::Aggregate);
  CHECK(parse_query_class("join") == QueryClass::Join);
  CHECK(parse_query_class("other") == QueryClass::Other);
  CHECK(std::string(to_string(QueryClass::SelectionOnly)) == "selection-only");
  CHECK_THROWS_AS(parse_query_class("weird"), ValidationError);

  CHECK(parse_run_mode("sql") == RunMode::Sql);
  CHECK(parse_run_mode("nl") == RunMode::Nl);
  CHECK(parse_run_mode("nl-cot") == RunMode::NlCot);
  CHECK_FALSE(parse_run_mode("prolog").has_value());
  CHECK(std::string(to_string(RunMode::NlCot)) == "nl-cot");
}

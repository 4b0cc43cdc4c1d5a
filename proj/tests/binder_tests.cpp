#include <doctest.h>

#include <filesystem>

#include "galois/catalog.hpp"
#include "galois/errors.hpp"
#include "galois/sql_binder.hpp"

using namespace galois;
using namespace galois::sql;

namespace {

const std::filesystem::path kFixtures = GALOIS_FIXTURE_DIR;

const Catalog& world() {
  static Catalog catalog =
      load_catalog_file(kFixtures / "suites" / "world" / "catalog.json");
  return catalog;
}

BoundQuery bind_text(const char* text) { return bind(parse(text), world()); }

}  // namespace

TEST_CASE("bind resolves unqualified and qualified columns") {
  BoundQuery q = bind_text("SELECT name, population FROM city WHERE country = 'Italy'");
  REQUIRE(q.items.size() == 2);
  CHECK(q.items[0].column->qualified() == "city.name");
  CHECK(q.items[0].output_name == "name");
  CHECK(q.items[0].output_type == ValueType::Text);
  CHECK(q.items[1].output_type == ValueType::Int);
  REQUIRE(q.predicates.size() == 1);
  CHECK(q.predicates[0].lhs.attribute == "country");
  CHECK_FALSE(q.predicates[0].is_join());
}

TEST_CASE("bind expands star in declaration order") {
  BoundQuery q = bind_text("SELECT * FROM country");
  REQUIRE(q.items.size() == 5);
  CHECK(q.items[0].output_name == "name");
  CHECK(q.items[1].output_name == "continent");
  CHECK(q.items[2].output_name == "population");
  CHECK(q.items[3].output_name == "gdp");
  CHECK(q.items[4].output_name == "code");
}

TEST_CASE("bind star with multiple tables expands left to right") {
  BoundQuery q = bind_text(
      "SELECT * FROM city ci, country co WHERE ci.country = co.name");
  CHECK(q.items.size() == 4 + 5);
  CHECK(q.items[0].column->table == 0);
  CHECK(q.items.back().column->table == 1);
  // both tables contribute a bare `name`; ORDER BY name is then ambiguous
  auto cols = q.output_columns();
  CHECK(cols[0].name == "name");
  CHECK(cols[4].name == "name");
  CHECK_THROWS_AS(bind_text("SELECT * FROM city ci, country co "
                            "WHERE ci.country = co.name ORDER BY name"),
                  BindError);
}

TEST_CASE("bind output naming") {
  BoundQuery q = bind_text(
      "SELECT c.name AS city, COUNT(*), AVG(c.population), SUM(population) "
      "FROM city c GROUP BY c.name");
  CHECK(q.items[0].output_name == "city");
  CHECK(q.items[1].output_name == "COUNT(*)");
  CHECK(q.items[1].star_count);
  CHECK(q.items[2].output_name == "AVG(c.population)");
  CHECK(q.items[3].output_name == "SUM(population)");
  CHECK(q.items[1].output_type == ValueType::Int);
  CHECK(q.items[2].output_type == ValueType::Float);
  CHECK(q.items[3].output_type == ValueType::Int);
}

TEST_CASE("aggregate output types") {
  BoundQuery q = bind_text(
      "SELECT MIN(name), MAX(population), AVG(population), SUM(gdp), COUNT(code) "
      "FROM country");
  CHECK(q.items[0].output_type == ValueType::Text);   // MIN keeps input type
  CHECK(q.items[1].output_type == ValueType::Int);
  CHECK(q.items[2].output_type == ValueType::Float);  // AVG always float
  CHECK(q.items[3].output_type == ValueType::Float);  // SUM of float
  CHECK(q.items[4].output_type == ValueType::Int);
}

TEST_CASE("bind join predicate marks both sides") {
  BoundQuery q = bind_text(
      "SELECT ci.name FROM city ci, country co WHERE ci.country = co.name");
  REQUIRE(q.predicates.size() == 1);
  CHECK(q.predicates[0].is_join());
  CHECK(q.predicates[0].lhs.table == 0);
  CHECK(q.predicates[0].rhs_column().table == 1);
  CHECK(q.tables[0].effective_name == "ci");
  CHECK(q.tables[1].decl->name == "country");
}

TEST_CASE("order by binds to outputs when possible") {
  BoundQuery q = bind_text("SELECT name AS n FROM city ORDER BY n");
  REQUIRE(q.order_by.size() == 1);
  CHECK(q.order_by[0].output_index == 0);

  // a source column outside the projection is allowed for plain queries
  BoundQuery q2 = bind_text("SELECT name FROM city ORDER BY population DESC");
  REQUIRE(q2.order_by.size() == 1);
  CHECK_FALSE(q2.order_by[0].output_index.has_value());
  CHECK(q2.order_by[0].column->attribute == "population");
  CHECK(q2.order_by[0].descending);

  // aggregate queries must sort on projected columns
  BoundQuery q3 = bind_text(
      "SELECT continent, COUNT(*) FROM country GROUP BY continent ORDER BY continent");
  CHECK(q3.order_by[0].output_index == 0);
  CHECK_THROWS_AS(
      bind_text("SELECT continent, COUNT(*) FROM country GROUP BY continent "
                "ORDER BY population"),
      BindError);

  // distinct queries too
  CHECK_THROWS_AS(bind_text("SELECT DISTINCT country FROM city ORDER BY name"),
                  BindError);
}

TEST_CASE("bind type-checks predicate literals") {
  CHECK_THROWS_AS(bind_text("SELECT name FROM city WHERE population = 'many'"),
                  BindError);
  CHECK_THROWS_AS(bind_text("SELECT name FROM city WHERE is_capital > 'x'"),
                  BindError);
  CHECK_THROWS_AS(bind_text("SELECT name FROM city WHERE name = 42"), BindError);
  // int literal against float attribute is fine
  BoundQuery q = bind_text("SELECT name FROM country WHERE gdp > 1000");
  CHECK(q.predicates[0].rhs_literal() == Cell::integer(1000));
}

TEST_CASE("bind rejects ambiguous and unknown references") {
  CHECK_THROWS_AS(bind_text("SELECT name FROM nowhere"), BindError);
  CHECK_THROWS_AS(bind_text("SELECT nope FROM city"), BindError);
  CHECK_THROWS_AS(bind_text("SELECT x.name FROM city"), BindError);
  // `name` exists in both city and country
  CHECK_THROWS_AS(
      bind_text("SELECT name FROM city ci, country co WHERE ci.country = co.name"),
      BindError);
  // duplicate effective names
  CHECK_THROWS_AS(bind_text("SELECT 1 FROM city c, country c"), ParseError);
  CHECK_THROWS_AS(bind_text("SELECT c.name FROM city c, country c"), BindError);
}

TEST_CASE("bind rejects aggregate misuse") {
  // ungrouped plain column next to an aggregate is allowed (first value wins)
  BoundQuery q = bind_text("SELECT country, COUNT(*) FROM city GROUP BY country");
  CHECK(q.has_aggregates());

  CHECK_THROWS_AS(bind_text("SELECT COUNT(*) FROM city WHERE COUNT(*) > 1"),
                  ParseError);
  CHECK_THROWS_AS(bind_text("SELECT name FROM city GROUP BY nope"), BindError);
  // grouping a local table works the same
  BoundQuery q2 = bind_text("SELECT country, AVG(salary) FROM employees GROUP BY country");
  CHECK(q2.items[1].output_type == ValueType::Float);
}

TEST_CASE("bound predicate display") {
  BoundQuery q = bind_text("SELECT name FROM city WHERE population >= 1000000");
  CHECK(q.predicates[0].display() == "city.population >= 1000000");
  BoundQuery q2 = bind_text(
      "SELECT ci.name FROM city ci, country co WHERE ci.country = co.name");
  CHECK(q2.predicates[0].display() == "ci.country = co.name");
}

TEST_CASE("output_columns matches items") {
  BoundQuery q = bind_text("SELECT name, COUNT(*) AS n FROM city GROUP BY name");
  auto cols = q.output_columns();
  REQUIRE(cols.size() == 2);
  CHECK(cols[0] == Column{"name", ValueType::Text});
  CHECK(cols[1] == Column{"n", ValueType::Int});
}

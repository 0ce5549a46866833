#include "catch_amalgamated.hpp"

#include "support.hpp"

#include "reactsynth/error.hpp"
#include "reactsynth/problem.hpp"

#include <json.hpp>

using namespace reactsynth;
using namespace reactsynth::testing;

namespace {

nlohmann::json base()
{
  return nlohmann::json::parse(R"js({
    "name": "toy",
    "system": {
      "A": [[1]], "B": [[1]], "C": [[0]], "x0": [0], "horizon": 2,
      "u_box": [[0, 1]], "w_box": [[0, 1]]
    },
    "formula": "F[1,2](x0 > 1)"
  })js");
}

ProblemSpec parse(const nlohmann::json & j) { return parse_problem(j.dump()); }

}  // namespace

TEST_CASE("a minimal spec takes the defaults")
{
  const auto p = parse(base());
  CHECK(p.name == "toy");
  CHECK(p.system.horizon == 2);
  CHECK(p.epsilon == 0.1);
  CHECK(p.oracle == OracleMode::Satisfy);
  CHECK_FALSE(p.finite());
  CHECK_FALSE(p.seed.has_value());
  CHECK(p.formula == parse_formula("F[1,2](x0 > 1)"));
}

TEST_CASE("optional fields are read")
{
  auto j = base();
  j["epsilon"] = 0.25;
  j["seed"] = 7;
  j["max_iters"] = 12;
  j["oracle"] = {{"mode", "maximize"}, {"precision", 0.01}};
  j["lipschitz"] = {{"u", 3}, {"w", 4}};
  j["definitions"] = {{"big", "x0 > 1"}, {"bigger", "big & x0 > 1.5"}};
  j["formula"] = "F[1,2] bigger";
  const auto p = parse(j);
  CHECK(p.epsilon == 0.25);
  CHECK(*p.seed == 7);
  CHECK(*p.max_iters == 12);
  CHECK(p.oracle == OracleMode::Maximize);
  CHECK(*p.precision == 0.01);
  CHECK(*p.lipschitz_u == 3);
  CHECK(*p.lipschitz_w == 4);
  CHECK(p.formula == parse_formula("F[1,2]((x0 > 1) & (x0 > 1.5))"));
  const auto cfg = p.cegis_config();
  CHECK(cfg.epsilon == 0.25);
  CHECK(cfg.max_iters == 12);
}

TEST_CASE("bundled specs load")
{
  for (const char * name : {"continuous_rps", "discrete_rps", "modified_rps", "rps_assumptions", "true_spec"}) {
    INFO(name);
    const auto p = bundled(name);
    CHECK(p.name == name);
    CHECK_NOTHROW(p.validate());
    CHECK_NOTHROW(p.arena());
  }
  CHECK(bundled("discrete_rps").finite());
  CHECK(bundled("discrete_rps").finite_game().u_moves.size() == 3);
}

TEST_CASE("invalid specs are rejected with the right error")
{
  SECTION("malformed JSON")
  {
    CHECK_THROWS_AS(parse_problem("{\"name\": "), ParseError);
  }
  SECTION("malformed formula reports its position")
  {
    auto j = base();
    j["formula"] = "x0 > 0 &\n  nope";
    try {
      parse(j);
      FAIL("expected a parse error");
    } catch (const ParseError & e) {
      CHECK(e.line == 2);
      CHECK(e.column == 3);
    }
  }
  SECTION("non-positive epsilon")
  {
    auto j = base();
    j["epsilon"] = 0;
    CHECK_THROWS_AS(parse(j), DomainError);
    j["epsilon"] = -1;
    CHECK_THROWS_AS(parse(j), DomainError);
  }
  SECTION("inconsistent dimensions")
  {
    auto j = base();
    j["system"]["B"] = {{1, 1}};
    CHECK_THROWS_AS(parse(j), DimensionError);
  }
  SECTION("empty box")
  {
    auto j = base();
    j["system"]["u_box"] = {{1, 0}};
    CHECK_THROWS_AS(parse(j), DomainError);
  }
  SECTION("moves for only one player")
  {
    auto j = base();
    j["u_moves"] = {{{"name", "a"}, {"value", {0}}}};
    CHECK_THROWS(parse(j));
  }
  SECTION("missing formula")
  {
    auto j = base();
    j.erase("formula");
    CHECK_THROWS_AS(parse(j), DomainError);
  }
}

TEST_CASE("CSV traces")
{
  const auto t = parse_trace_csv("x0,x1\n1,2\n3.5, -4\n");
  REQUIRE(t.size() == 2);
  CHECK(t[0] == Eigen::Vector2d(1, 2));
  CHECK(t[1] == Eigen::Vector2d(3.5, -4));
  CHECK(parse_trace_csv("0.5\n1.5").size() == 2);
  CHECK(parse_trace_csv("1,2\r\n3,4\r\n\n").size() == 2);
  CHECK_THROWS_AS(parse_trace_csv("1,2\n3,abc\n"), ParseError);
  CHECK_THROWS_AS(parse_trace_csv("1,2\n3\n"), DimensionError);
  CHECK_THROWS_AS(parse_trace_csv("x0\n"), ParseError);
  CHECK_THROWS_AS(load_trace_csv("/nonexistent/trace.csv"), Error);
}

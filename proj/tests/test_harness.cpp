#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "dssf/common.hpp"
#include "dssf/harness.hpp"

using namespace dssf;

namespace {

std::vector<std::string> errors_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.errors();
  }
  return {};
}

bool any_contains(const std::vector<std::string>& errs, const std::string& needle) {
  return std::any_of(errs.begin(), errs.end(), [&](const std::string& e) { return e.find(needle) != std::string::npos; });
}

std::string render(const ScenarioResult& r) {
  std::string out = to_csv(rows_table(r.rows));
  for (const auto& [name, t] : r.tables) out += name + "\n" + to_csv(t);
  return out;
}

}  // namespace

TEST_CASE("defaults round-trip through serialization") {
  for (const auto& name : scenario_names()) {
    const auto c = parse_config("[scenario]\nname = " + name + "\n");
    CHECK(c.scenario() == name);
    CHECK(parse_config(serialize_config(c)) == c);
  }
  const auto d = parse_config("");
  CHECK(d.scenario() == "identities");
  CHECK(d.num("field.b0") == 2.0);
  CHECK(parse_config("[scenario]\nname = ssf-inside\n").list("sweep.lambda").front() == 0.99);
}

TEST_CASE("comments, lists and overrides") {
  const auto c = parse_config("# header\n[field]\nb0 = 3 # field strength\n[sweep]\np = 1, 3\n");
  CHECK(c.num("field.b0") == 3.0);
  CHECK(c.list("sweep.p") == std::vector<double>{1.0, 3.0});
}

TEST_CASE("every problem is reported at once") {
  const auto errs = errors_of("[field]\nb0 = -1\ncolour = red\n[potential]\nnu = 2.5\n[nowhere]\nx = 1\n");
  CHECK(any_contains(errs, "FieldSpec"));
  CHECK(any_contains(errs, "b0 > 0"));
  CHECK(any_contains(errs, "nu > 3"));
  CHECK(any_contains(errs, "field.colour"));
  CHECK(any_contains(errs, "[nowhere]"));
  CHECK(errs.size() >= 4);
}

TEST_CASE("syntax errors and duplicates") {
  CHECK(any_contains(errors_of("[field\n"), "malformed"));
  CHECK(any_contains(errors_of("b0 = 1\n"), "outside any section"));
  CHECK(any_contains(errors_of("[field]\nb0 = 1\nb0 = 2\n"), "duplicate"));
  CHECK(any_contains(errors_of("[field]\nb0 = abc\n"), "line 2"));
  CHECK(any_contains(errors_of("[scenario]\nname = nope\n"), "nope"));
}

TEST_CASE("row ordering puts NaN first and is total") {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<ResultRow> rows(4);
  rows[0].scenario = "b";
  rows[1].scenario = "a";
  rows[1].lambda = 2.0;
  rows[2].scenario = "a";
  rows[2].lambda = nan;
  rows[3].scenario = "a";
  rows[3].lambda = 1.0;
  rows[3].metric = "z";
  sort_rows(rows);
  CHECK(rows[0].scenario == "a");
  CHECK(std::isnan(rows[0].lambda));
  CHECK(rows[1].lambda == 1.0);
  CHECK(rows[2].lambda == 2.0);
  CHECK(rows[3].scenario == "b");
}

TEST_CASE("results do not depend on the thread count") {
  for (const std::string name : {"kernels", "identities"}) {
    const auto c = parse_config("[scenario]\nname = " + name + "\n");
    set_thread_count(1);
    const auto a = render(run_scenario(c));
    set_thread_count(4);
    const auto b = render(run_scenario(c));
    set_thread_count(1);
    CHECK(a == b);
  }
}

TEST_CASE("dirac-check scenario passes") {
  const auto r = run_scenario(parse_config("[scenario]\nname = dirac-check\n[truncation]\nl = 3\nn = 8\n"));
  CHECK(r.all_pass());
  CHECK(r.tables.count("spectrum") == 1);
}

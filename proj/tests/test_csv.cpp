#include <doctest.h>

#include <cmath>
#include <limits>
#include <stdexcept>

#include "dssf/csv.hpp"

using namespace dssf;

TEST_CASE("number formatting") {
  CHECK(format_number(0.5) == "0.50000000000000000");
  CHECK(format_number(1e-4).find('e') != std::string::npos);
  CHECK(format_number(2e7).find('e') != std::string::npos);
  CHECK(std::stod(format_number(0.1)) == 0.1);
  CHECK(std::stod(format_number(-123.456)) == -123.456);
  CHECK(format_cell(CsvCell{42LL}) == "42");
}

TEST_CASE("quoting and line endings") {
  CsvTable t;
  t.header = {"name", "value"};
  t.add({std::string("a,b"), 1LL});
  t.add({std::string("say \"hi\""), 2LL});
  CHECK(to_csv(t) == "name,value\n\"a,b\",1\n\"say \"\"hi\"\"\",2\n");
}

TEST_CASE("empty table has only the header") {
  CsvTable t;
  t.header = {"x"};
  CHECK(to_csv(t) == "x\n");
}

TEST_CASE("write failure reports the path") {
  CsvTable t;
  t.header = {"x"};
  CHECK_THROWS_AS(write_csv(t, "/nonexistent-dir/out.csv"), std::runtime_error);
}

TEST_CASE("short formatting round-trips") {
  CHECK(format_short(0.1) == "0.1");
  CHECK(format_short(8.0) == "8");
  CHECK(std::stod(format_short(1.0 / 3.0)) == 1.0 / 3.0);
}

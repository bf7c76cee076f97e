// SPDX-License-Identifier: MIT
#include <doctest.h>

#include <cstdlib>

#include "degenkernel/format.hpp"

using namespace degenkernel;

TEST_CASE("17 significant digits round-trip") {
  for (double v : {0.1, 1.0 / 3.0, 2.718281828459045, 1e-300, 6.02214076e23, -0.0}) {
    CHECK(std::strtod(fmt17(v).c_str(), nullptr) == v);
  }
  CHECK(fmt17(0.1) == "0.10000000000000001");
}

TEST_CASE("CSV quoting") {
  CHECK(csv_field("plain") == "plain");
  CHECK(csv_field("a,b") == "\"a,b\"");
  CHECK(csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(csv_line({"x", "y,z"}) == "x,\"y,z\"\n");
}

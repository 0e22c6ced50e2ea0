#include "doctest.h"
#include "gafzero/util.hpp"

#include <stdexcept>

using namespace gafzero;

TEST_CASE("format_double round-trips typical values") {
    CHECK(format_double(1.0) == "1");
    CHECK(format_double(0.5) == "0.5");
    CHECK(format_double(-2.25) == "-2.25");
}

TEST_CASE("split handles empty fields") {
    const auto f = split("a,,b", ',');
    REQUIRE(f.size() == 3);
    CHECK(f[0] == "a");
    CHECK(f[1].empty());
    CHECK(f[2] == "b");
}

TEST_CASE("strict parsers reject trailing garbage") {
    CHECK(parse_double_strict("0.25", "x") == 0.25);
    CHECK(parse_int_strict("-3", "x") == -3);
    CHECK_THROWS_AS(parse_double_strict("1.0x", "x"), std::invalid_argument);
    CHECK_THROWS_AS(parse_double_strict("", "x"), std::invalid_argument);
    CHECK_THROWS_AS(parse_int_strict("2.5", "x"), std::invalid_argument);
}

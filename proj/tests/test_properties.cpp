#include <doctest.h>

#include "properties.hpp"

using namespace halfflat;
using namespace halfflat::testgen;

namespace {
constexpr int kCases = 1000;
}

TEST_CASE("the catalog of property-test algebras satisfies Jacobi") {
  for (const auto &s : nilpotent_notations()) {
    CAPTURE(s);
    CHECK(jacobi_check(parse_structure_notation(s)).pass);
  }
}

TEST_CASE("d^2 = 0") { CHECK(d_squared_failures(kCases, 101) == 0); }

TEST_CASE("Leibniz rule") { CHECK(leibniz_failures(kCases, 102) == 0); }

TEST_CASE("Hodge star identities") { CHECK(hodge_failures(kCases, 103) == 0); }

TEST_CASE("K^2 = lambda Id for every 3-form") {
  int negative = 0;
  CHECK(k_squared_failures(kCases, 104, &negative) == 0);
  // both stability types occur
  CHECK(negative > 0);
  CHECK(negative < kCases);
}

TEST_CASE("Lefschetz round trip") { CHECK(lefschetz_failures(kCases, 105) == 0); }

TEST_CASE("reduce after lift is the identity") { CHECK(reduce_lift_failures(kCases, 106) == 0); }

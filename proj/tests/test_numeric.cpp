#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "coimpact/errors.hpp"
#include "coimpact/numeric.hpp"
#include "generators.hpp"

using namespace coimpact;

TEST_SUITE("numeric") {
  TEST_CASE("exact_sum recovers cancelled terms") {
    const std::vector<double> v = {1e100, 1.0, -1e100};
    CHECK(exact_sum(v) == 1.0);
    const std::vector<double> w = {0.1, 0.2, 0.3, -0.6};
    CHECK(exact_sum(w) == doctest::Approx(0.1 + 0.2 + 0.3 - 0.6).epsilon(1.0));
    CHECK(exact_sum(std::vector<double>{}) == 0.0);
  }

  TEST_CASE("exact_sum is permutation invariant and odd") {
    gen::Source src(11);
    for (int trial = 0; trial < 500; ++trial) {
      std::vector<double> v(static_cast<std::size_t>(src.integer(1, 40)));
      for (auto& x : v) x = src.sign() * src.log_uniform(1e-20, 1e20);
      const double s = exact_sum(v);
      std::shuffle(v.begin(), v.end(), src.engine());
      CHECK(exact_sum(v) == s);
      for (auto& x : v) x = -x;
      CHECK(exact_sum(v) == -s);
    }
  }

  TEST_CASE("format_double round trips") {
    gen::Source src(12);
    for (int trial = 0; trial < 2000; ++trial) {
      const double x = src.sign() * src.log_uniform(1e-300, 1e300);
      CHECK(parse_double(format_double(x), "x") == x);
    }
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(-2.0) == "-2");
  }

  TEST_CASE("strict parsing rejects junk") {
    CHECK_THROWS_AS(parse_double("1.5x", "v"), DataError);
    CHECK_THROWS_AS(parse_double("", "v"), DataError);
    CHECK_THROWS_AS(parse_integer("3.0", "v"), DataError);
    CHECK(parse_integer("-7", "v") == -7);
    CHECK(parse_double("1e-5", "v") == 1e-5);
  }
}

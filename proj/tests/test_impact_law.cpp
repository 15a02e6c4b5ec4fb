#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "coimpact/errors.hpp"
#include "coimpact/impact_law.hpp"
#include "coimpact/numeric.hpp"
#include "generators.hpp"

using namespace coimpact;

TEST_SUITE("impact_law") {
  TEST_CASE("sign_power") {
    CHECK(sign_power(-4.0, 0.5) == -2.0);
    CHECK(sign_power(0.0, 0.3) == 0.0);
    CHECK(sign_power(0.04, 0.5) == doctest::Approx(0.2).epsilon(1e-15));
    CHECK_THROWS_AS(sign_power(1.0, 0.0), DomainError);
  }

  TEST_CASE("sqrt_law") {
    CHECK(sqrt_law(0.01, 1.0) == 0.1);
    CHECK(sqrt_law(-0.01, 1.0) == -0.1);
    CHECK(sqrt_law(0.04, 0.5) == doctest::Approx(0.1).epsilon(1e-15));
  }

  TEST_CASE("aggregate_impact examples") {
    const std::vector<double> a = {0.01, 0.03};
    CHECK(aggregate_impact(a, {1.0, 1.0, 0.5}) == doctest::Approx(0.2).epsilon(1e-15));
    CHECK(aggregate_impact(a, {1.0, 0.5, 0.5}) == doctest::Approx(0.1 + std::sqrt(0.03)).epsilon(1e-14));
    const std::vector<double> b = {0.02, -0.02};
    for (double d : {0.2, 0.5, 1.0}) CHECK(aggregate_impact(b, {1.0, 1.0, d}) == 0.0);
    CHECK_THROWS_AS(aggregate_impact(a, {1.0, 1.0, 1.5}), DomainError);
    CHECK_THROWS_AS(aggregate_impact(a, {0.0, 1.0, 0.5}), DomainError);
  }

  TEST_CASE("global_impact") {
    CHECK(global_impact(0.09, 1.0) == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(global_impact(-0.09, 1.0) == doctest::Approx(-0.3).epsilon(1e-15));
    CHECK(global_impact(0.0, 2.0) == 0.0);
  }

  TEST_CASE("shifted_sqrt") {
    CHECK(shifted_sqrt(0.0, 1.0, 1e-4) == doctest::Approx(0.01).epsilon(1e-15));
    CHECK(shifted_sqrt(0.0099, 2.0, 1e-4) == doctest::Approx(0.2).epsilon(1e-14));
    for (double phi : {0.0, 1e-5, 0.3}) CHECK(shifted_sqrt(phi, 0.7, 0.0) == doctest::Approx(sqrt_law(phi, 0.7)));
    CHECK_THROWS_AS(shifted_sqrt(-0.1, 1.0, 0.01), DomainError);
  }

  TEST_CASE("properties over random panels") {
    gen::Source src(31);
    for (int trial = 0; trial < 10000; ++trial) {
      auto phis = src.phis(src.integer(1, 30));
      const AnsatzParams p{src.uniform(0.1, 3.0), src.uniform(0.1, 2.0), src.uniform(0.1, 1.0)};
      const double base = aggregate_impact(phis, p);

      auto shuffled = phis;
      std::shuffle(shuffled.begin(), shuffled.end(), src.engine());
      CHECK(aggregate_impact(shuffled, p) == base);

      auto negated = phis;
      for (auto& x : negated) x = -x;
      CHECK(aggregate_impact(negated, p) == -base);

      const double lambda = src.uniform(0.1, 1.0);
      auto scaled = phis;
      for (auto& x : scaled) x *= lambda;
      CHECK(aggregate_impact(scaled, p) ==
            doctest::Approx(std::pow(lambda, p.delta) * base).epsilon(1e-12).scale(1e-300));

      const double unit = aggregate_impact(phis, {p.y_ratio, 1.0, 0.5});
      CHECK(std::fabs(unit - global_impact(exact_sum(phis), p.y_ratio)) <= 1e-12 * std::max(1.0, std::fabs(unit)));
    }
  }
}

#include <doctest.h>

#include <cmath>

#include "govkit/budget.hpp"
#include "govkit/error.hpp"
#include "support.hpp"

using namespace govkit;
using namespace govkit::repro;
using testsupport::oracles;

TEST_CASE("epsilon bound matches a direct evaluation") {
  for (const auto& o : oracles()["budget"]["epsilon_bound"]) {
    CHECK(epsilon_bound(o["n"].get<std::uint64_t>(), o["alpha"].get<double>()) ==
          doctest::Approx(o["epsilon"].get<double>()).epsilon(1e-12));
  }
}

TEST_CASE("required budget matches a brute-force search") {
  for (const auto& o : oracles()["budget"]["required_budget"]) {
    const auto e = o["epsilon"].get<double>();
    const auto a = o["alpha"].get<double>();
    CHECK(required_budget(e, a) == o["n"].get<std::uint64_t>());
    CHECK(approximate_budget(e, a) == o["approximate_n"].get<std::uint64_t>());
  }
}

TEST_CASE("property: required budget is the least n meeting the target") {
  for (double e = 0.002; e < 0.9; e *= 1.37) {
    for (double a : {0.001, 0.01, 0.05, 0.2}) {
      const auto n = required_budget(e, a);
      CHECK(epsilon_bound(n, a) <= e);
      if (n > 1) CHECK(epsilon_bound(n - 1, a) > e);
      CHECK(approximate_budget(e, a) >= n);
    }
  }
}

TEST_CASE("property: epsilon is strictly decreasing in n and in alpha") {
  for (std::uint64_t n = 1; n < 2000; n += 13) {
    CHECK(epsilon_bound(n + 1, 0.01) < epsilon_bound(n, 0.01));
    CHECK(epsilon_bound(n, 0.05) < epsilon_bound(n, 0.01));
  }
  CHECK(epsilon_bound(1, 0.01) == doctest::Approx(0.99));
}

TEST_CASE("domain errors") {
  for (auto fn : {+[] { epsilon_bound(0, 0.01); }, +[] { epsilon_bound(10, 0.0); }, +[] { epsilon_bound(10, 1.0); },
                  +[] { required_budget(0.0, 0.01); }, +[] { required_budget(1.0, 0.01); },
                  +[] { required_budget(0.1, std::nan("")); }, +[] { approximate_budget(0.1, 1.5); }}) {
    try {
      fn();
      FAIL("expected domain_error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::domain_error);
    }
  }
  const auto b = make_budget(50, 0.01);
  CHECK(b.n == 50);
  CHECK(b.epsilon == doctest::Approx(0.0880).epsilon(1e-3));
}

#include <doctest.h>

#include <cmath>

#include "gpinv/coeff_vector.hpp"
#include "gpinv/error.hpp"
#include "oracles.hpp"

using namespace gpinv;

TEST_CASE("basis and coordinates") {
  const auto e3 = CoeffVector::basis(3);
  CHECK(e3.at(1) == 0.0);
  CHECK(e3.at(3) == 1.0);
  CHECK(e3.at(100) == 0.0);
  CHECK(e3.support() == 3);
  CHECK(e3.finitely_supported());
  CHECK(e3.head(2) == std::vector<double>{0.0, 0.0});
  CHECK(e3.head(4) == std::vector<double>{0.0, 0.0, 1.0, 0.0});
  CHECK(CoeffVector({0.0, 2.0, 0.0}).support() == 2);
  CHECK(CoeffVector().support() == 0);
  CHECK_THROWS_AS(CoeffVector::basis(0), Error);
}

TEST_CASE("power tails") {
  const auto y = CoeffVector::power_law(1.0, 2.0);
  CHECK_FALSE(y.finitely_supported());
  CHECK(y.at(4) == 1.0 / 16.0);
  CHECK(y.head(3) == std::vector<double>{1.0, 0.25, 1.0 / 9.0});

  const CoeffVector mixed({7.0, 2.0}, PowerTail{3.0, 1.5});
  CHECK(mixed.at(2) == 2.0);
  CHECK(mixed.at(3) == doctest::Approx(3.0 * std::pow(3.0, -1.5)).epsilon(1e-15));
}

TEST_CASE("non square-summable tails are rejected") {
  try {
    CoeffVector::power_law(1.0, 0.5);
    FAIL("expected DomainViolation");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DomainViolation);
  }
  CHECK_NOTHROW(CoeffVector({}, PowerTail{0.0, 0.1}));
}

TEST_CASE("tail norms agree with direct summation") {
  for (double p : {1.0, 2.0, 3.0}) {
    const auto y = CoeffVector::power_law(1.0, p);
    for (std::size_t n : {0u, 1u, 7u, 64u, 1024u}) {
      CAPTURE(p);
      CAPTURE(n);
      const double want = oracle::power_tail(2.0 * p, n);
      CHECK(y.tail_norm_sq(n) == doctest::Approx(want).epsilon(1e-12));
    }
  }
  const CoeffVector mixed({3.0, 4.0}, PowerTail{2.0, 2.0});
  CHECK(mixed.tail_norm_sq(1) == doctest::Approx(16.0 + 4.0 * oracle::power_tail(4.0, 2)).epsilon(1e-13));
  CHECK(CoeffVector({3.0, 4.0}).norm() == 5.0);
}

TEST_CASE("power_sum_from") {
  CHECK(power_sum_from(2.0, 1) == doctest::Approx(M_PI * M_PI / 6.0).epsilon(1e-14));
  CHECK(power_sum_from(6.0, 1) == doctest::Approx(std::pow(M_PI, 6) / 945.0).epsilon(1e-14));
  CHECK_THROWS_AS(power_sum_from(1.0, 1), Error);
}

TEST_CASE("padded distance") {
  const std::vector<double> a{1.0, 2.0}, b{1.0, 2.0, 2.0};
  CHECK(padded_distance(a, b) == 2.0);
  CHECK(padded_distance(b, a) == 2.0);
  CHECK(norm2(b) == 3.0);
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "weylbc/bounds.hpp"
#include "weylbc/oracle.hpp"

using weylbc::Potential;

TEST_CASE("weighted_moment_bound examples") {
  CHECK(weylbc::weighted_moment_bound(1.0, 1.0, 0.0, 1) == doctest::Approx(2.0));
  CHECK(weylbc::weighted_moment_bound(0.0, 3.0, 2.0, 4) == 0.0);
}

TEST_CASE("property: weighted_moment_bound dominates the exact integral for f == 1") {
  // int_0^a (x+b)^n dx = ((a+b)^{n+1} - b^{n+1}) / (n+1), and ||1|| = 1
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> U(0.0, 5.0);
  for (int rep = 0; rep < 200; ++rep) {
    const double a = U(rng), b = U(rng);
    const int n = 1 + static_cast<int>(rng() % 6);
    const double exact =
        (std::pow(a + b, n + 1) - std::pow(b, n + 1)) / (n + 1.0);
    CHECK(exact <= weylbc::weighted_moment_bound(1.0, a, b, n) * (1 + 1e-12));
  }
}

TEST_CASE("exponential amplitude bound") {
  CHECK(weylbc::amplitude_bound(Potential::zero(), 3.0) == 0.0);
  CHECK(weylbc::amplitude_bound(Potential::constant(1.0), 0.0) == 0.0);

  const double b = weylbc::amplitude_bound(Potential::constant(1.0), 1.0);
  const double twopi = 6.28318530717958647692;
  const double direct =
      0.5 * (std::exp(2.0 * std::sqrt(2.0)) +
             std::exp(2.0 * std::exp(1.0)) / std::sqrt(twopi));
  CHECK(b == doctest::Approx(direct).epsilon(1e-12));
  CHECK(b == doctest::Approx(54.2683).epsilon(1e-4));
}

TEST_CASE("L1 amplitude bound") {
  CHECK(weylbc::amplitude_bound_l1(Potential::zero(), 4.0) == 0.0);
  CHECK(weylbc::amplitude_bound_l1(Potential::box(1.0, 1.0), 2.0) ==
        doctest::Approx(std::exp(2.0)).epsilon(1e-12));
  CHECK(weylbc::amplitude_bound_l1(Potential::box(1.0, 1.0), 0.0) == 0.0);
  CHECK_THROWS_AS(weylbc::amplitude_bound_l1(Potential::constant(1.0), 1.0),
                  weylbc::config_error);
}

TEST_CASE("sup-norm amplitude bound") {
  CHECK(weylbc::amplitude_bound_linf(0.0, 2.0) == 0.0);
  // sum_{n>=1} 1/(n!(n+1)!) = I_1(2) - 1, verified by brute-force summation
  double brute = 0.0, fact_n = 1.0, fact_n1 = 1.0;
  for (int n = 1; n <= 20; ++n) {
    fact_n *= n;
    fact_n1 *= (n + 1);
    brute += 1.0 / (fact_n * fact_n1);
  }
  const double b = weylbc::amplitude_bound_linf(1.0, 1.0);
  CHECK(b == doctest::Approx(brute).epsilon(1e-12));
  CHECK(b == doctest::Approx(0.590636854636).epsilon(1e-9));
}

TEST_CASE("sup-norm bound dominates the constant-potential deviation") {
  // for q == c the deviation |A(alpha) - c| from the closed form stays
  // below the sup-norm bound on [0, 3]
  const double c = 1.0;
  for (int i = 0; i <= 300; ++i) {
    const double alpha = 0.01 * i;
    const double dev = std::abs(weylbc::closed_form_amplitude(c, alpha) - c);
    CHECK(dev <= weylbc::amplitude_bound_linf(c, alpha) * (1 + 1e-9) + 1e-15);
  }
}

TEST_CASE("iterate remainder majorant shrinks with the term index") {
  auto q = Potential::constant(0.5);
  double prev = weylbc::neumann_remainder_majorant(q, 2.0, 1);
  CHECK(prev > 0.0);
  for (int n = 2; n <= 12; ++n) {
    const double cur = weylbc::neumann_remainder_majorant(q, 2.0, n);
    CHECK(cur < prev);
    prev = cur;
  }
  CHECK(weylbc::neumann_remainder_majorant(Potential::zero(), 2.0, 1) == 0.0);
}

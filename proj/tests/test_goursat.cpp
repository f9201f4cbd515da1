#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "weylbc/amplitude.hpp"
#include "weylbc/goursat.hpp"
#include "weylbc/oracle.hpp"

using weylbc::GoursatGrid;
using weylbc::Potential;
using weylbc::TriangularGrid;

namespace {

// Direct-sum reference for the characteristic-variable solve, independent of
// the cumulative-sum bookkeeping.
TriangularGrid naive_goursat(const Potential& q, double X, double h) {
  const auto n = static_cast<std::size_t>(std::llround(2.0 * X / h));
  std::vector<double> cq(n + 1), qm(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    cq[i] = q.cumulative(0.5 * h * static_cast<double>(i));
    if (i >= 1) qm[i] = q.eval(0.5 * h * static_cast<double>(i) - 0.25 * h);
  }
  TriangularGrid V(n);
  for (std::size_t i = 0; i <= n; ++i) V(i, 0) = -0.5 * cq[i];
  // column integral E(a_p, v_j) = int_0^{v_j} q((a_p - b)/2) V(a_p, b) db
  auto E = [&](std::size_t p, std::size_t j) {
    double acc = 0.0;
    for (std::size_t l = 1; l <= j; ++l) {
      acc += qm[p - l + 1] * 0.5 * h * (V(p, l - 1) + V(p, l));
    }
    return acc;
  };
  for (std::size_t j = 1; j <= n; ++j) {
    for (std::size_t i = j; i <= n; ++i) {
      if (i == j) {
        V(i, j) = 0.0;
        continue;
      }
      // fixed-point iteration on the single implicit value; the contraction
      // factor is q h^2 / 16
      double guess = V(i, j - 1);
      for (int it = 0; it < 80; ++it) {
        V(i, j) = guess;
        double D = 0.0;
        for (std::size_t p = j; p < i; ++p) {
          D += 0.5 * h * (E(p, j) + E(p + 1, j));
        }
        const double next = -0.5 * (cq[i] - cq[j]) - 0.25 * D;
        const bool done = std::abs(next - guess) < 1e-15;
        guess = next;
        if (done) break;
      }
      V(i, j) = guess;
    }
  }
  return V;
}

}  // namespace

TEST_CASE("zero potential: V and w vanish identically") {
  auto V = weylbc::solve_V(Potential::zero(), 1.0, 0.05);
  for (std::size_t j = 0; j <= V.n(); ++j) {
    for (std::size_t i = j; i <= V.n(); ++i) CHECK(V.at(i, j) == 0.0);
  }
  auto w = weylbc::wave_kernel_from_V(V);
  for (double v : w.data) CHECK(v == 0.0);
}

TEST_CASE("boundary rows are exact") {
  auto V = weylbc::solve_V(Potential::constant(1.0), 1.0, 0.05);
  for (std::size_t i = 0; i <= V.n(); ++i) {
    // V(t, 0) = -(1/2) int_0^{t/2} q = -t/4 for q == 1
    CHECK(V.at(i, 0) ==
          doctest::Approx(-0.25 * 0.05 * static_cast<double>(i)).epsilon(1e-14));
    CHECK(V.at(i, i) == 0.0);
  }
}

TEST_CASE("cumulative-sum solve equals the direct-sum reference") {
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  std::vector<double> vals(4);
  for (auto& v : vals) v = U(rng);
  for (const auto& q :
       {Potential::constant(0.8), Potential::box(1.0, 0.5),
        Potential::sampled(0.25, vals)}) {
    const double h = 1.0 / 8.0, X = 1.0;
    auto fast = weylbc::solve_V(q, X, h);
    auto slow = naive_goursat(q, X, h);
    for (std::size_t j = 0; j <= fast.n(); ++j) {
      for (std::size_t i = j; i <= fast.n(); ++i) {
        CHECK(fast.at(i, j) == doctest::Approx(slow(i, j)).epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("first iterate behavior for the constant potential") {
  // V(2u, 2v) = -(u-v)/2 + u v (u-v)/4 + higher order
  const double h = 1.0 / 80.0;
  auto V = weylbc::solve_V(Potential::constant(1.0), 1.0, h);
  const double u = 0.2, v = 0.1;
  const auto i = static_cast<std::size_t>(std::llround(2.0 * u / h));
  const auto j = static_cast<std::size_t>(std::llround(2.0 * v / h));
  const double expect = -0.5 * (u - v) + 0.25 * u * v * (u - v);
  CHECK(V.at(i, j) == doctest::Approx(expect).epsilon(2e-4));
}

TEST_CASE("wave kernel: change of variables and Goursat data") {
  const double h = 1.0 / 50.0;
  auto q = Potential::constant(1.0);
  auto V = weylbc::solve_V(q, 1.0, h);
  auto w = weylbc::wave_kernel_from_V(V);
  // w(x, x) = -(1/2) int_0^x q, exact on the diagonal rows that map to the
  // first boundary row of V
  for (std::size_t i = 0; i <= w.n / 2; ++i) {
    CHECK(w.at(i, i) ==
          doctest::Approx(-0.5 * h * static_cast<double>(i)).epsilon(1e-13));
  }
  // w(1, 1) = -0.5 sits at the anti-diagonal corner
  const auto i1 = static_cast<std::size_t>(std::llround(1.0 / h));
  CHECK(w.valid(i1, i1));
  CHECK(w.at(i1, i1) == doctest::Approx(-0.5).epsilon(1e-13));
  // w(x, 0) = 0 only at x = 0; the s = 0 row holds the single point w(0,0)
  CHECK(w.at(0, 0) == 0.0);
}

TEST_CASE("response kernel from the derivative path") {
  auto Vz = weylbc::solve_V(Potential::zero(), 1.0, 0.05);
  auto rz = weylbc::response_from_goursat(Vz, Potential::zero());
  for (double v : rz.samples) CHECK(v == 0.0);

  auto qb = Potential::box(3.0, 1.0);
  auto rb = weylbc::response_from_goursat(weylbc::solve_V(qb, 1.0, 0.05), qb);
  CHECK(rb.samples[0] == doctest::Approx(-1.5).epsilon(1e-14));

  auto q1 = Potential::constant(1.0);
  const double h = 1.0 / 200.0;
  auto r1 = weylbc::response_from_goursat(weylbc::solve_V(q1, 1.0, h), q1);
  // r(2) = -A(1)/2 = -J_1(2)/2
  CHECK(r1.samples.back() == doctest::Approx(-0.2883624038784367).epsilon(2e-3));
  CHECK(std::abs(r1.samples.back() + 0.2883624038784367) < 5e-4);
}

TEST_CASE("cross-path identity: -2 r(2 alpha) recovers the amplitude") {
  for (const auto& q :
       {Potential::constant(1.0), Potential::box(1.0, 1.0),
        Potential::exp_decay(1.0, 1.0)}) {
    const double h = 1.0 / 100.0;
    auto prof = diagonal_amplitude(weylbc::solve_kernel_march(q, 1.5, h), q);
    auto rg = weylbc::response_from_goursat(weylbc::solve_V(q, 1.5, h), q);
    double worst = 0.0;
    for (std::size_t j = 0; j < prof.size(); ++j) {
      worst = std::max(worst,
                       std::abs(-2.0 * rg.samples[2 * j] - prof.samples[j]));
    }
    CHECK(worst < 5e-3);  // O(h^2) scale at h = 1/100
  }
}

TEST_CASE("halving h shrinks the cross-path discrepancy by [3,5]") {
  auto q = Potential::exp_decay(1.0, 1.0);
  auto sup_disc = [&](double h) {
    auto prof = diagonal_amplitude(weylbc::solve_kernel_march(q, 1.5, h), q);
    auto rg = weylbc::response_from_goursat(weylbc::solve_V(q, 1.5, h), q);
    double worst = 0.0;
    for (std::size_t j = 0; j < prof.size(); ++j) {
      worst = std::max(worst,
                       std::abs(-2.0 * rg.samples[2 * j] - prof.samples[j]));
    }
    return worst;
  };
  const double d1 = sup_disc(1.0 / 100.0);
  const double d2 = sup_disc(1.0 / 200.0);
  CHECK(d1 / d2 >= 3.0);
  CHECK(d1 / d2 <= 5.0);
}

TEST_CASE("diagonal derivatives are antisymmetric and match the kernel") {
  auto q = Potential::constant(1.0);
  const double h = 1.0 / 100.0;
  auto V = weylbc::solve_V(q, 1.0, h);
  auto r = weylbc::response_from_goursat(V, q);
  for (std::size_t i : {std::size_t{20}, std::size_t{100}, std::size_t{180}}) {
    const double vu = weylbc::diagonal_derivative_u(V, q, i);
    const double vv = weylbc::diagonal_derivative_v(V, q, i);
    CHECK(vu + vv == 0.0);
    CHECK(r.samples[i] == doctest::Approx(vu - vv).epsilon(1e-14));
  }
  // one-sided difference of the grid approaches the u-derivative
  const std::size_t i = 100;
  const double fd = (V.at(i + 1, i) - V.at(i, i)) / h;
  CHECK(std::abs(fd - weylbc::diagonal_derivative_u(V, q, i)) < 0.05);
}

TEST_CASE("wave field representation") {
  // zero potential: pure translated control
  auto Vz = weylbc::solve_V(Potential::zero(), 2.0, 0.01);
  auto wz = weylbc::wave_kernel_from_V(Vz);
  auto f = weylbc::BoundaryControl::sine(0.01, 200);
  CHECK(weylbc::wave_solution(wz, f, 1.3, 0.7) == 0.0);  // x > t
  CHECK(weylbc::wave_solution(wz, f, 0.7, 0.7) == 0.0);  // leading edge, f(0) = 0
  const double u = weylbc::wave_solution(wz, f, 0.5, 1.5);
  CHECK(u == doctest::Approx(std::sin(1.0)).epsilon(1e-6));

  // nonzero potential: compare against an independent fine quadrature of the
  // representation at one interior point
  auto q = Potential::constant(1.0);
  const double h = 1.0 / 100.0;
  auto V = weylbc::solve_V(q, 1.0, h);
  auto w = weylbc::wave_kernel_from_V(V);
  const double x = 0.3, t = 0.9;
  double ref = f.interp(t - x);
  const int nq = 4000;
  for (int s = 0; s < nq; ++s) {
    const double s0 = x + (t - x) * s / nq;
    const double s1 = x + (t - x) * (s + 1) / nq;
    auto integrand = [&](double ss) {
      return weylbc::detail::wave_interp(w, x, ss) * f.interp(t - ss);
    };
    ref += 0.5 * (s1 - s0) * (integrand(s0) + integrand(s1));
  }
  CHECK(weylbc::wave_solution(w, f, x, t) == doctest::Approx(ref).epsilon(1e-6));

  CHECK_THROWS_AS(weylbc::wave_solution(w, f, 0.9, 1.9),
                  weylbc::domain_violation);
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "weylbc/amplitude.hpp"
#include "weylbc/oracle.hpp"

using weylbc::AmplitudeProfile;
using weylbc::Potential;
using weylbc::TriangularGrid;

namespace {

// Reference solver: the same discretization written as direct sums, no
// cumulative-sum reuse. O(n^4), test-sized grids only.
TriangularGrid naive_march(const Potential& q, double X, double h) {
  const auto n = static_cast<std::size_t>(std::llround(X / h));
  std::vector<double> qn(n + 1), dql(n + 1), dqr(n + 1), qm(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    const double x = h * static_cast<double>(i);
    qn[i] = q.eval(x);
    dql[i] = q.eval_left(x) - qn[i];
    dqr[i] = q.eval_right(x) - qn[i];
    if (i >= 1) qm[i] = q.eval(x - 0.5 * h);
  }
  TriangularGrid A(n);
  for (std::size_t i = 0; i <= n; ++i) A(i, 0) = qn[i];
  auto B = [&](std::size_t ii, std::size_t l) {
    double acc = 0.0;
    for (std::size_t u = l + 1; u <= ii; ++u) {
      acc += 0.5 * h * (A(u - 1, l) + dqr[u - 1] + A(u, l) + dql[u]);
    }
    return acc;
  };
  for (std::size_t j = 1; j <= n; ++j) {
    for (std::size_t i = j; i <= n; ++i) {
      double outer_known = 0.0;
      for (std::size_t l = 0; l + 1 < j; ++l) {
        outer_known += qm[i - l] * 0.5 * h * (B(i, l) + B(i, l + 1));
      }
      if (i == j) {
        A(i, j) = qn[i] - (outer_known + qm[i - j + 1] * 0.5 * h * B(i, j - 1));
      } else {
        double S = 0.0;
        for (std::size_t u = j + 1; u < i; ++u) {
          S += 0.5 * h * (A(u - 1, j) + dqr[u - 1] + A(u, j) + dql[u]);
        }
        S += 0.5 * h * (A(i - 1, j) + dqr[i - 1] + dql[i]);
        const double coeff = 1.0 + qm[i - j + 1] * 0.25 * h * h;
        A(i, j) =
            (qn[i] - outer_known - qm[i - j + 1] * 0.5 * h * (B(i, j - 1) + S)) /
            coeff;
      }
    }
  }
  return A;
}

AmplitudeProfile march_profile(const Potential& q, double X, double h) {
  return diagonal_amplitude(weylbc::solve_kernel_march(q, X, h), q);
}

}  // namespace

TEST_CASE("zero potential solves to exactly zero") {
  auto grid = weylbc::solve_kernel_march(Potential::zero(), 2.0, 0.01);
  for (std::size_t j = 0; j <= grid.n(); ++j) {
    for (std::size_t i = j; i <= grid.n(); ++i) {
      CHECK(grid.at(i, j) == 0.0);
    }
  }
  auto series = weylbc::neumann_sum(Potential::zero(), 2.0, 0.01, 1e-8);
  CHECK(series.converged);
  for (double v : series.samples) CHECK(v == 0.0);
}

TEST_CASE("row j = 0 carries q exactly and profile[0] = q(0)") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  std::vector<double> vals(8);
  for (auto& v : vals) v = U(rng);
  auto q = Potential::sampled(0.25, vals);
  auto grid = weylbc::solve_kernel_march(q, 2.0, 0.0125);
  for (std::size_t i = 0; i <= grid.n(); ++i) {
    CHECK(grid.at(i, 0) == q.eval(0.0125 * static_cast<double>(i)));
  }
  auto prof = diagonal_amplitude(grid, q);
  CHECK(prof.samples[0] == q.eval(0.0));
  CHECK(prof.bound[0] == 0.0);
}

TEST_CASE("cumulative-sum solver equals the direct-sum reference") {
  std::mt19937 rng(13);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  std::vector<double> vals(6);
  for (auto& v : vals) v = U(rng);
  std::vector<Potential> family = {Potential::box(1.0, 0.5),
                                   Potential::exp_decay(0.8, 1.0),
                                   Potential::sampled(0.25, vals)};
  for (const auto& q : family) {
    const double h = 1.0 / 16.0, X = 1.5;
    auto fast = weylbc::solve_kernel_march(q, X, h);
    auto slow = naive_march(q, X, h);
    for (std::size_t j = 0; j <= fast.n(); ++j) {
      for (std::size_t i = j; i <= fast.n(); ++i) {
        CHECK(fast.at(i, j) == doctest::Approx(slow(i, j)).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("constant potential: leading deviation is -alpha^2/2") {
  auto prof = march_profile(Potential::constant(1.0), 0.5, 1.0 / 400.0);
  const double alpha = 0.1;
  const auto j = static_cast<std::size_t>(std::llround(alpha / prof.h));
  CHECK(prof.samples[j] ==
        doctest::Approx(1.0 - 0.5 * alpha * alpha).epsilon(1e-5));
}

TEST_CASE("constant potential matches the Bessel closed form") {
  auto prof = march_profile(Potential::constant(1.0), 1.0, 1.0 / 400.0);
  CHECK(prof.samples.back() ==
        doctest::Approx(0.5767248077568734).epsilon(2e-4));
  // profile[400] at alpha = 1 within 1e-4 absolute
  CHECK(std::abs(prof.samples[400] - 0.5767248077568734) <= 1e-4);
}

TEST_CASE("convergence order: halving h cuts the sup error by [3,5]") {
  auto q = Potential::constant(1.0);
  auto err = [&](double h) {
    auto prof = march_profile(q, 1.5, h);
    double worst = 0.0;
    for (std::size_t j = 0; j < prof.size(); ++j) {
      const double alpha = prof.h * static_cast<double>(j);
      worst = std::max(worst, std::abs(prof.samples[j] -
                                       weylbc::closed_form_amplitude(1.0, alpha)));
    }
    return worst;
  };
  const double e1 = err(1.0 / 100.0);
  const double e2 = err(1.0 / 200.0);
  CHECK(e1 / e2 >= 3.0);
  CHECK(e1 / e2 <= 5.0);
}

TEST_CASE("iterate terms: zero potential, hand values, brute force") {
  for (const auto& t : weylbc::neumann_terms(Potential::zero(), 1.0, 0.05, 3)) {
    for (double v : t.samples) CHECK(v == 0.0);
  }

  auto terms = weylbc::neumann_terms(Potential::constant(1.0), 1.0, 1.0 / 400.0, 2);
  REQUIRE(terms.size() == 2);
  // (Kq)(alpha, alpha) = alpha^2/2 for q == 1
  CHECK(terms[0].samples.back() == doctest::Approx(0.5).epsilon(1e-5));
  CHECK(terms[0].samples[200] == doctest::Approx(0.125).epsilon(1e-5));
  // (K^2 q)(1, 1) = 1/12
  CHECK(terms[1].samples.back() == doctest::Approx(1.0 / 12.0).epsilon(1e-4));

  // brute force the same double integral: K^2 q (1,1) =
  // int_0^1 dv int_v^1 (u v - v^2/2) du for q == 1
  const int nq = 2000;
  double brute = 0.0;
  for (int iv = 0; iv < nq; ++iv) {
    const double v = (iv + 0.5) / nq;
    const double inner = v * 0.5 * (1.0 - v * v) - 0.5 * v * v * (1.0 - v);
    brute += inner / nq;
  }
  CHECK(terms[1].samples.back() == doctest::Approx(brute).epsilon(1e-4));
}

TEST_CASE("per-term majorant dominates the computed iterates") {
  for (const auto& q : {Potential::box(0.5, 1.0), Potential::exp_decay(1.0, 1.0)}) {
    for (const auto& t : weylbc::neumann_terms(q, 2.0, 1.0 / 100.0, 5)) {
      for (std::size_t j = 0; j < t.size(); ++j) {
        CHECK(std::abs(t.samples[j]) <=
              t.bound[j] * (1.0 + weylbc::kBoundSlack) + 1e-300);
      }
    }
  }
}

TEST_CASE("series sum agrees with the marching solver") {
  for (const auto& q :
       {Potential::constant(0.5), Potential::box(0.5, 1.0),
        Potential::exp_decay(0.5, 1.0)}) {
    const double h = 1.0 / 100.0;
    auto series = weylbc::neumann_sum(q, 2.0, h, 1e-8);
    CHECK(series.converged);
    auto march = march_profile(q, 2.0, h);
    double worst = 0.0;
    for (std::size_t j = 0; j < march.size(); ++j) {
      worst = std::max(worst, std::abs(series.samples[j] - march.samples[j]));
    }
    CHECK(worst <= 1e-6);
  }
}

TEST_CASE("positivity: q >= 0 makes every iterate nonnegative") {
  auto q = Potential::box(0.5, 1.0);
  const double h = 1.0 / 50.0;
  auto arr = weylbc::detail::make_solve_arrays(q, 2.0, h, "test");
  TriangularGrid F = weylbc::detail::seed_grid(arr);
  for (int t = 1; t <= 6; ++t) {
    TriangularGrid G = weylbc::detail::apply_kernel_operator(arr, F, t == 1);
    for (std::size_t j = 0; j <= G.n(); ++j) {
      for (std::size_t i = j; i <= G.n(); ++i) {
        CHECK(G(i, j) >= 0.0);
      }
    }
    F = std::move(G);
  }
}

TEST_CASE("a-priori exponential bound holds for both methods") {
  std::mt19937 rng(101);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  std::vector<double> vals(12);
  for (auto& v : vals) v = U(rng);
  auto q = Potential::sampled(0.25, vals);
  const double h = 1.0 / 64.0;
  auto march = march_profile(q, 3.0, h);
  auto series = weylbc::neumann_sum(q, 3.0, h, 1e-10);
  CHECK(series.converged);
  for (const auto* prof : {&march, &series}) {
    for (std::size_t j = 0; j < prof->size(); ++j) {
      const double alpha = h * static_cast<double>(j);
      const double dev = std::abs(prof->samples[j] - q.eval(alpha));
      CHECK(dev <= prof->bound[j] * (1.0 + weylbc::kBoundSlack) + 1e-300);
    }
  }
}

TEST_CASE("validation errors") {
  CHECK_THROWS_AS(weylbc::solve_kernel_march(Potential::zero(), 1.0, 0.3),
                  weylbc::config_error);  // X/h not integral
  CHECK_THROWS_AS(
      weylbc::solve_kernel_march(Potential::sampled(0.1, {1.0, 1.0}), 1.0, 0.03),
      weylbc::config_error);  // misaligned sampled step
  CHECK_THROWS_AS(weylbc::neumann_sum(Potential::zero(), 1.0, 0.1, 0.0),
                  weylbc::config_error);
  // degenerate implicit step: 1 + q h^2/4 == 0
  const double h = 0.1;
  auto bad = Potential::constant(-4.0 / (h * h));
  CHECK_THROWS_AS(weylbc::solve_kernel_march(bad, 1.0, h), weylbc::solver_error);
}

TEST_CASE("series flags non-convergence instead of looping") {
  // term magnitudes ~ c^{n+1} X^{2n} / (n!(n+1)!) still sit far above the
  // tolerance at the 64-term cap for c = 25, X = 5
  auto q = Potential::constant(25.0);
  auto p = weylbc::neumann_sum(q, 5.0, 1.0 / 20.0, 1e-10);
  CHECK_FALSE(p.converged);
  CHECK(p.terms_used == 64);
}

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "weylbc/bounds.hpp"
#include "weylbc/errors.hpp"
#include "weylbc/grid.hpp"
#include "weylbc/potential.hpp"

namespace weylbc {

// Triangular grid of values A(i*h, j*h), 0 <= j <= i <= n, solving
//   A(x,y) = q(x) - int_0^y ( int_v^x A(u,v) du ) q(x-v) dv.
// Row j = 0 carries q(i*h) exactly.
struct KernelGrid {
  double h = 0.0;
  TriangularGrid values;
  std::size_t n() const { return values.n(); }
  double at(std::size_t i, std::size_t j) const { return values(i, j); }
};

enum class AmplitudeMethod { march, neumann };

// A(alpha) sampled on alpha = j*h together with the exponential a-priori
// bound on |A - q| per point.
struct AmplitudeProfile {
  double h = 0.0;
  std::vector<double> samples;
  AmplitudeMethod method = AmplitudeMethod::march;
  std::vector<double> bound;
  int terms_used = 0;      // iterate count (series method only)
  bool converged = true;   // false when the series hit the term cap

  std::size_t size() const { return samples.size(); }
  double alpha_max() const {
    return samples.empty() ? 0.0 : h * static_cast<double>(samples.size() - 1);
  }
};

namespace detail {

struct SolveArrays {
  std::size_t n = 0;
  double h = 0.0;
  std::vector<double> q_node;   // q(i*h)
  std::vector<double> dql;      // left-limit minus node value
  std::vector<double> dqr;      // right-limit minus node value
  std::vector<double> q_mid;    // q(d*h - h/2), d = 1..n
};

inline std::size_t checked_steps(double extent, double h, const char* what) {
  if (!(h > 0) || !std::isfinite(h)) {
    throw config_error(std::string(what) + ": step must be positive and finite");
  }
  if (!(extent > 0) || !std::isfinite(extent)) {
    throw config_error(std::string(what) + ": extent must be positive and finite");
  }
  const double ratio = extent / h;
  const auto n = static_cast<std::size_t>(std::llround(ratio));
  if (n < 1 || std::abs(ratio - static_cast<double>(n)) > 1e-9 * std::max(1.0, ratio)) {
    throw config_error(std::string(what) +
                       ": extent must be an integer multiple of the step");
  }
  return n;
}

inline void check_sampled_alignment(const Potential& q, double h) {
  if (const auto* s = std::get_if<SampledPotential>(&q.kind())) {
    const double ratio = s->step / h;
    const auto m = static_cast<long long>(std::llround(ratio));
    if (m < 1 || std::abs(ratio - static_cast<double>(m)) > 1e-9 * std::max(1.0, ratio)) {
      throw config_error(
          "sampled potential step must be an integer multiple of the grid step");
    }
  }
}

inline SolveArrays make_solve_arrays(const Potential& q, double X, double h,
                                     const char* what) {
  SolveArrays a;
  a.n = checked_steps(X, h, what);
  a.h = h;
  check_sampled_alignment(q, h);
  a.q_node.resize(a.n + 1);
  a.dql.resize(a.n + 1);
  a.dqr.resize(a.n + 1);
  a.q_mid.resize(a.n + 1);
  for (std::size_t i = 0; i <= a.n; ++i) {
    const double x = static_cast<double>(i) * h;
    a.q_node[i] = q.eval(x);
    a.dql[i] = q.eval_left(x) - a.q_node[i];
    a.dqr[i] = q.eval_right(x) - a.q_node[i];
    if (i >= 1) a.q_mid[i] = q.eval(static_cast<double>(i) * h - 0.5 * h);
  }
  return a;
}

// int_v^x f(u, v) du accumulated one panel at a time; the quadrature is
// trapezoid in f with one-sided node values at f's jump lines (jumps[] is
// the difference between the one-sided limits and the stored node values).
struct PanelAccumulator {
  double h;
  const std::vector<double>* dql;  // nullptr when f is continuous
  const std::vector<double>* dqr;

  double extend(double B_prev, double f_prev, double f_cur, std::size_t i) const {
    double lo = f_prev, hi = f_cur;
    if (dqr) lo += (*dqr)[i - 1];
    if (dql) hi += (*dql)[i];
    return B_prev + 0.5 * h * (lo + hi);
  }
};

}  // namespace detail

// Marching solver for the kernel grid: levels in y, within a level the
// single implicit unknown per x-step is eliminated in closed form. Cost is
// O(n^2) via cumulative sums of the inner integral B(x,v) = int_v^x A(u,v) du
// and of the outer integral, with the potential integrated per panel at its
// midpoint (exact for grid-aligned piecewise-constant q).
inline KernelGrid solve_kernel_march(const Potential& q, double X, double h) {
  auto arr = detail::make_solve_arrays(q, X, h, "solve_kernel_march");
  const std::size_t n = arr.n;

  KernelGrid grid;
  grid.h = h;
  grid.values = TriangularGrid(n);
  TriangularGrid& A = grid.values;

  const detail::PanelAccumulator acc{h, &arr.dql, &arr.dqr};

  std::vector<double> B_prev(n + 1, 0.0), B_cur(n + 1, 0.0), T(n + 1, 0.0);

  // level 0: empty outer integral, A(., 0) = q
  for (std::size_t i = 0; i <= n; ++i) A(i, 0) = arr.q_node[i];
  for (std::size_t i = 1; i <= n; ++i) {
    B_cur[i] = acc.extend(B_cur[i - 1], A(i - 1, 0), A(i, 0), i);
  }
  std::swap(B_prev, B_cur);

  for (std::size_t j = 1; j <= n; ++j) {
    for (std::size_t i = j; i <= n; ++i) {
      const double qm = arr.q_mid[i - j + 1];
      if (i == j) {
        B_cur[i] = 0.0;
        A(i, j) = arr.q_node[i] - (T[i] + qm * 0.5 * h * B_prev[i]);
        T[i] += qm * 0.5 * h * B_prev[i];
      } else {
        double S = B_cur[i - 1] +
                   0.5 * h * (A(i - 1, j) + arr.dqr[i - 1] + arr.dql[i]);
        const double coeff = 1.0 + qm * 0.25 * h * h;
        if (std::abs(coeff) < 1e-12) {
          throw solver_error(
              "solve_kernel_march: degenerate implicit step at x = " +
              std::to_string(static_cast<double>(i) * h) +
              "; the grid step is too large for this potential");
        }
        const double rhs = arr.q_node[i] - T[i] - qm * 0.5 * h * (B_prev[i] + S);
        A(i, j) = rhs / coeff;
        B_cur[i] = S + 0.5 * h * A(i, j);
        T[i] += qm * 0.5 * h * (B_prev[i] + B_cur[i]);
      }
    }
    std::swap(B_prev, B_cur);
  }
  return grid;
}

// A(alpha) = A(alpha, alpha) on the grid diagonal, with the exponential
// a-priori bound attached per point.
inline AmplitudeProfile diagonal_amplitude(const KernelGrid& grid,
                                           const Potential& q) {
  AmplitudeProfile p;
  p.h = grid.h;
  p.method = AmplitudeMethod::march;
  const std::size_t n = grid.n();
  p.samples.resize(n + 1);
  p.bound.resize(n + 1);
  for (std::size_t j = 0; j <= n; ++j) {
    p.samples[j] = grid.at(j, j);
    p.bound[j] = amplitude_bound(q, static_cast<double>(j) * grid.h);
  }
  return p;
}

namespace detail {

// One application of the Volterra operator
//   (Kf)(x,y) = int_0^y q(x-v) ( int_v^x f(u,v) du ) dv
// on the triangular grid. f_has_q_jumps marks the first iterate, whose
// integrand inherits q's discontinuities in u.
inline TriangularGrid apply_kernel_operator(const SolveArrays& arr,
                                            const TriangularGrid& F,
                                            bool f_has_q_jumps) {
  const std::size_t n = arr.n;
  const double h = arr.h;
  const PanelAccumulator acc{h, f_has_q_jumps ? &arr.dql : nullptr,
                             f_has_q_jumps ? &arr.dqr : nullptr};

  TriangularGrid BF(n);  // BF(i, j) = int_{v_j}^{x_i} f(u, v_j) du
  for (std::size_t j = 0; j <= n; ++j) {
    BF(j, j) = 0.0;
    for (std::size_t i = j + 1; i <= n; ++i) {
      BF(i, j) = acc.extend(BF(i - 1, j), F(i - 1, j), F(i, j), i);
    }
  }

  TriangularGrid G(n);
  for (std::size_t i = 0; i <= n; ++i) {
    G(i, 0) = 0.0;
    double acc_outer = 0.0;
    for (std::size_t j = 1; j <= i; ++j) {
      const double qm = arr.q_mid[i - j + 1];
      acc_outer += qm * 0.5 * h * (BF(i, j - 1) + BF(i, j));
      G(i, j) = acc_outer;
    }
  }
  return G;
}

inline TriangularGrid seed_grid(const SolveArrays& arr) {
  TriangularGrid F(arr.n);
  for (std::size_t j = 0; j <= arr.n; ++j) {
    for (std::size_t i = j; i <= arr.n; ++i) F(i, j) = arr.q_node[i];
  }
  return F;
}

}  // namespace detail

// Diagonals of the iterates A_n = K^n q for n = 1..N, computed by the same
// panel quadrature as the marching solver but fully explicit. The bound
// field carries the per-term majorant
//   Q(alpha)^2 alpha^{n-1} (alpha+n-1)^{n-1} ||q||^{n-1} / ((n-1)!)^2.
inline std::vector<AmplitudeProfile> neumann_terms(const Potential& q, double X,
                                                   double h, int N) {
  if (N < 1) throw config_error("neumann_terms: N must be >= 1");
  auto arr = detail::make_solve_arrays(q, X, h, "neumann_terms");
  const std::size_t n = arr.n;

  std::vector<AmplitudeProfile> terms;
  terms.reserve(static_cast<std::size_t>(N));
  TriangularGrid F = detail::seed_grid(arr);
  for (int t = 1; t <= N; ++t) {
    TriangularGrid G = detail::apply_kernel_operator(arr, F, t == 1);
    AmplitudeProfile p;
    p.h = h;
    p.method = AmplitudeMethod::neumann;
    p.terms_used = t;
    p.samples.resize(n + 1);
    p.bound.resize(n + 1);
    for (std::size_t j = 0; j <= n; ++j) {
      p.samples[j] = G(j, j);
      const double alpha = static_cast<double>(j) * h;
      p.bound[j] = neumann_remainder_majorant(q, alpha, t - 1) -
                   neumann_remainder_majorant(q, alpha, t);
    }
    terms.push_back(std::move(p));
    F = std::move(G);
  }
  return terms;
}

// Alternating iterate sum A = q - Kq + K^2 q - ... on the diagonal, summed
// until the newest term (sup norm) or the analytic remainder majorant drops
// below tol. Caps at 64 terms and flags non-convergence instead of looping;
// the marching solver is the fallback in that regime.
inline AmplitudeProfile neumann_sum(const Potential& q, double X, double h,
                                    double tol) {
  if (!(tol > 0)) throw config_error("neumann_sum: tol must be > 0");
  auto arr = detail::make_solve_arrays(q, X, h, "neumann_sum");
  const std::size_t n = arr.n;

  AmplitudeProfile p;
  p.h = h;
  p.method = AmplitudeMethod::neumann;
  p.samples.assign(arr.q_node.begin(), arr.q_node.end());
  p.bound.resize(n + 1);
  for (std::size_t j = 0; j <= n; ++j) {
    p.bound[j] = amplitude_bound(q, static_cast<double>(j) * h);
  }

  constexpr int kMaxTerms = 64;
  TriangularGrid F = detail::seed_grid(arr);
  double sign = -1.0;
  p.converged = false;
  for (int t = 1; t <= kMaxTerms; ++t) {
    TriangularGrid G = detail::apply_kernel_operator(arr, F, t == 1);
    double sup = 0.0;
    for (std::size_t j = 0; j <= n; ++j) {
      p.samples[j] += sign * G(j, j);
      sup = std::max(sup, std::abs(G(j, j)));
    }
    p.terms_used = t;
    if (sup <= tol || neumann_remainder_majorant(q, X, t) <= tol) {
      p.converged = true;
      break;
    }
    sign = -sign;
    F = std::move(G);
  }
  return p;
}

// Per-point report of |A(alpha) - q(alpha)| against the tightest bound that
// applies to q's class.
inline std::vector<BoundReport> check_amplitude_bounds(
    const AmplitudeProfile& profile, const Potential& q) {
  std::vector<BoundReport> reports;
  reports.reserve(profile.size());
  const bool l1 = q.integrable();
  const double sup = q.sup_norm();
  for (std::size_t j = 0; j < profile.size(); ++j) {
    const double alpha = static_cast<double>(j) * profile.h;
    BoundReport r;
    r.alpha = alpha;
    r.lhs = std::abs(profile.samples[j] - q.eval(alpha));
    r.rhs = amplitude_bound(q, alpha);
    if (l1) r.rhs = std::min(r.rhs, amplitude_bound_l1(q, alpha));
    if (std::isfinite(sup)) r.rhs = std::min(r.rhs, amplitude_bound_linf(sup, alpha));
    r.satisfied = r.lhs <= r.rhs * (1.0 + kBoundSlack);
    reports.push_back(r);
  }
  return reports;
}

}  // namespace weylbc

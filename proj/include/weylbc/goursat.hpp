#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "weylbc/errors.hpp"
#include "weylbc/grid.hpp"
#include "weylbc/potential.hpp"
#include "weylbc/response.hpp"

namespace weylbc {

// Grid of V on the doubled characteristic variables: values(i, j) holds
// V(i*h, j*h) for 0 <= j <= i <= n with n*h = 2X, solving
//   V(u,v) = -(1/2) int_{v/2}^{u/2} q
//            - (1/4) int_0^v db int_v^u da q((a-b)/2) V(a,b).
// The boundary rows V(u,u) = 0 and V(u,0) = -(1/2) int_0^{u/2} q hold
// exactly (the cumulative of q is evaluated in closed form).
struct GoursatGrid {
  double h = 0.0;
  TriangularGrid values;
  std::size_t n() const { return values.n(); }
  double at(std::size_t i, std::size_t j) const { return values(i, j); }
};

// Wave kernel w(x, s) = V(s+x, s-x) resampled to the (x, s) grid; stored for
// 0 <= x <= s with x + s <= 2X (the part a V grid of extent 2X determines).
struct WaveKernel {
  double h = 0.0;
  std::size_t n = 0;  // index extent of the source V grid (2X = n*h)
  std::vector<double> data;
  std::vector<std::size_t> offsets;  // per s-level j

  bool valid(std::size_t i, std::size_t j) const {
    return j < offsets.size() && i <= std::min(j, n - j);
  }
  double at(std::size_t i, std::size_t j) const { return data[offsets[j] + i]; }
  double s_extent() const { return h * static_cast<double>(n); }
};

inline GoursatGrid solve_V(const Potential& q, double X, double h) {
  const std::size_t n = detail::checked_steps(2.0 * X, h, "solve_V");
  detail::check_sampled_alignment(q, h);

  // q is sampled at quarter-shifted half-grid points and its exact
  // cumulative at half-grid points, so grid-aligned jumps never land on a
  // quadrature node.
  std::vector<double> cq_half(n + 1), q_mid(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    cq_half[i] = q.cumulative(0.5 * h * static_cast<double>(i));
    if (i >= 1) q_mid[i] = q.eval(0.5 * h * static_cast<double>(i) - 0.25 * h);
  }

  GoursatGrid grid;
  grid.h = h;
  grid.values = TriangularGrid(n);
  TriangularGrid& V = grid.values;

  // E[i] accumulates int_0^{v_j} q((a_i-b)/2) V(a_i, b) db across levels.
  std::vector<double> E(n + 1, 0.0);

  for (std::size_t i = 0; i <= n; ++i) V(i, 0) = -0.5 * cq_half[i];

  for (std::size_t j = 1; j <= n; ++j) {
    double D_run = 0.0;  // int_{v_j}^{a_i} E(a, v_j) da within the level
    for (std::size_t i = j; i <= n; ++i) {
      const double qm = q_mid[i - j + 1];
      const double e_known = E[i] + 0.5 * h * qm * V(i, j - 1);
      if (i == j) {
        V(i, j) = 0.0;
        E[i] = e_known;
        D_run = 0.0;
      } else {
        const double d_known = D_run + 0.5 * h * E[i - 1] + 0.5 * h * e_known;
        const double coeff = 1.0 + qm * h * h / 16.0;
        if (std::abs(coeff) < 1e-12) {
          throw solver_error(
              "solve_V: degenerate implicit step at u = " +
              std::to_string(static_cast<double>(i) * h) +
              "; the grid step is too large for this potential");
        }
        const double rhs = -0.5 * (cq_half[i] - cq_half[j]) - 0.25 * d_known;
        V(i, j) = rhs / coeff;
        E[i] = e_known + 0.5 * h * qm * V(i, j);
        D_run = d_known + 0.25 * h * h * qm * V(i, j);
      }
    }
  }
  return grid;
}

inline WaveKernel wave_kernel_from_V(const GoursatGrid& V) {
  WaveKernel w;
  w.h = V.h;
  w.n = V.n();
  w.offsets.resize(w.n + 1);
  std::size_t total = 0;
  for (std::size_t j = 0; j <= w.n; ++j) {
    w.offsets[j] = total;
    total += std::min(j, w.n - j) + 1;
  }
  w.data.resize(total);
  for (std::size_t j = 0; j <= w.n; ++j) {
    const std::size_t imax = std::min(j, w.n - j);
    for (std::size_t i = 0; i <= imax; ++i) {
      w.data[w.offsets[j] + i] = V.at(j + i, j - i);
    }
  }
  return w;
}

namespace detail {

// int_0^{t_i} q((t_i - v)/2) V(t_i, v) dv over row i of the grid.
inline double goursat_row_integral(const GoursatGrid& G, const Potential& q,
                                   std::size_t i) {
  const double h = G.h;
  double acc = 0.0;
  for (std::size_t l = 0; l < i; ++l) {
    const double qm =
        q.eval(0.5 * h * static_cast<double>(i - l) - 0.25 * h);
    acc += qm * 0.5 * h * (G.at(i, l) + G.at(i, l + 1));
  }
  return acc;
}

}  // namespace detail

// Response kernel by the derivative path:
//   r(t) = w_x(0, t) = -(1/2) q(t/2) - (1/2) int_0^t q((t-v)/2) V(t, v) dv.
inline ResponseKernel response_from_goursat(const GoursatGrid& V,
                                            const Potential& q) {
  const std::size_t n = V.n();
  ResponseKernel r;
  r.h_t = V.h;
  r.samples.resize(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    const double qi = q.eval(0.5 * V.h * static_cast<double>(i));
    r.samples[i] = -0.5 * qi - 0.5 * detail::goursat_row_integral(V, q, i);
  }
  return r;
}

// The two diagonal derivatives of V; their sum vanishes identically and
// their difference is w_x(0, t).
inline double diagonal_derivative_u(const GoursatGrid& V, const Potential& q,
                                    std::size_t i) {
  const double qi = q.eval(0.5 * V.h * static_cast<double>(i));
  return -0.25 * qi - 0.25 * detail::goursat_row_integral(V, q, i);
}

inline double diagonal_derivative_v(const GoursatGrid& V, const Potential& q,
                                    std::size_t i) {
  const double qi = q.eval(0.5 * V.h * static_cast<double>(i));
  return 0.25 * qi + 0.25 * detail::goursat_row_integral(V, q, i);
}

namespace detail {

// Piecewise-linear interpolation of w over the stored triangle; cells
// straddling the diagonal use the three valid corners.
inline double wave_interp(const WaveKernel& w, double x, double s) {
  const double h = w.h;
  const double n = static_cast<double>(w.n);
  double xi = x / h, sj = s / h;
  xi = std::max(0.0, xi);
  sj = std::min(std::max(sj, xi), n);
  auto ii = static_cast<std::size_t>(std::min(xi, n - 1.0));
  auto jj = static_cast<std::size_t>(std::min(sj, n - 1.0));
  // keep all corners inside the stored triangle
  while (jj > 0 && ii + jj + 2 > w.n + 1 && jj > ii) --jj;
  if (ii > jj) ii = jj;
  const double a = std::min(std::max(xi - static_cast<double>(ii), 0.0), 1.0);
  const double b = std::min(std::max(sj - static_cast<double>(jj), 0.0), 1.0);
  if (ii == jj) {
    // upper triangle of the diagonal cell: corners (ii,jj), (ii,jj+1), (ii+1,jj+1)
    const double w00 = w.at(ii, jj);
    const double w01 = w.valid(ii, jj + 1) ? w.at(ii, jj + 1) : w00;
    const double w11 = w.valid(ii + 1, jj + 1) ? w.at(ii + 1, jj + 1) : w01;
    return w00 * (1.0 - b) + w01 * (b - a) + w11 * a;
  }
  const double w00 = w.at(ii, jj);
  const double w10 = w.valid(ii + 1, jj) ? w.at(ii + 1, jj) : w00;
  const double w01 = w.valid(ii, jj + 1) ? w.at(ii, jj + 1) : w00;
  const double w11 = w.valid(ii + 1, jj + 1) ? w.at(ii + 1, jj + 1) : w10;
  return (1.0 - a) * (1.0 - b) * w00 + a * (1.0 - b) * w10 +
         (1.0 - a) * b * w01 + a * b * w11;
}

}  // namespace detail

// Wave field u(x, t) = f(t-x) + int_x^t w(x, s) f(t-s) ds for x <= t and 0
// for x > t (finite propagation speed, exact).
inline double wave_solution(const WaveKernel& w, const BoundaryControl& f,
                            double x, double t) {
  if (x < 0 || t < 0) throw config_error("wave_solution: x and t must be >= 0");
  if (x > t) return 0.0;
  if (x + t > w.s_extent() * (1.0 + 1e-12)) {
    throw domain_violation("wave_solution: (x, t) outside the kernel's domain");
  }
  if (t > f.t_max() * (1.0 + 1e-12)) {
    throw config_error("wave_solution: control too short for requested t");
  }
  double u = f.interp(t - x);
  if (t <= x) return u;

  auto g = [&](double s) { return detail::wave_interp(w, x, s) * f.interp(t - s); };
  const double h = w.h;
  const auto j_lo = static_cast<std::size_t>(std::ceil(x / h - 1e-12));
  const auto j_hi = static_cast<std::size_t>(std::floor(t / h + 1e-12));
  double integral = 0.0;
  if (j_hi < j_lo || j_hi == 0) {
    integral = 0.5 * (t - x) * (g(x) + g(t));
  } else {
    const double s_lo = h * static_cast<double>(j_lo);
    const double s_hi = h * static_cast<double>(j_hi);
    if (s_lo - x > 1e-14) integral += 0.5 * (s_lo - x) * (g(x) + g(s_lo));
    for (std::size_t j = j_lo; j < j_hi; ++j) {
      const double s0 = h * static_cast<double>(j);
      integral += 0.5 * h * (g(s0) + g(s0 + h));
    }
    if (t - s_hi > 1e-14) integral += 0.5 * (t - s_hi) * (g(s_hi) + g(t));
  }
  return u + integral;
}

}  // namespace weylbc

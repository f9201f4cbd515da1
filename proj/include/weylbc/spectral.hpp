#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <vector>

#include "weylbc/amplitude.hpp"
#include "weylbc/errors.hpp"
#include "weylbc/potential.hpp"
#include "weylbc/response.hpp"

namespace weylbc {

// One evaluation of m(-k^2) with its accuracy metadata. tail_bound is finite
// only when Re k clears the convergence threshold.
struct MEvaluation {
  std::complex<double> k;
  std::complex<double> m;
  double alpha_max = 0.0;
  double quadrature_estimate = 0.0;
  double tail_bound = 0.0;
};

struct HerglotzReport {
  double im_z = 0.0;
  double im_m = 0.0;
  bool sign_agrees = false;
};

// The Laplace representation of m(-k^2) converges absolutely for
// Re k > 2 max{ sqrt(2 ||q||), e ||q|| }.
inline double convergence_threshold(double norm_q) {
  if (!(norm_q >= 0) || !std::isfinite(norm_q)) {
    throw config_error("convergence_threshold: norm must be finite and >= 0");
  }
  return 2.0 * std::max(std::sqrt(2.0 * norm_q), std::exp(1.0) * norm_q);
}

// Closed-form upper bound for |int_{alpha_max}^inf A(alpha) e^{-2 alpha k}|,
// majorizing |A| <= |q| + (exponential bound) and Q(alpha) <= ||q||(alpha+1).
inline double tail_bound(const Potential& q, double alpha_max,
                         std::complex<double> k) {
  if (!(alpha_max >= 0)) throw config_error("tail_bound: alpha_max must be >= 0");
  const double norm = q.local_l1_norm();
  const double kappa = k.real();
  if (!(kappa > convergence_threshold(norm))) {
    throw domain_violation("tail_bound: Re k is below the convergence threshold");
  }
  if (norm == 0.0) return 0.0;
  const double twopi = 6.28318530717958647692;
  // tail of int |q| e^{-2 alpha kappa} via unit windows
  const double piece_q =
      norm * std::exp(-2.0 * kappa * alpha_max) / (1.0 - std::exp(-2.0 * kappa));
  const double c1 = 2.0 * kappa - 2.0 * std::sqrt(2.0 * norm);
  const double c2 = 2.0 * kappa - 2.0 * std::exp(1.0) * norm;
  auto poly_tail = [alpha_max](double c) {
    const double a1 = alpha_max + 1.0;
    return std::exp(-c * alpha_max) *
           (a1 * a1 / c + 2.0 * a1 / (c * c) + 2.0 / (c * c * c));
  };
  return piece_q +
         0.5 * norm * norm * (poly_tail(c1) + poly_tail(c2) / std::sqrt(twopi));
}

namespace detail {

struct NodeCorrection {
  std::size_t idx = 0;
  double dl = 0.0;  // left limit minus node value
  double dr = 0.0;  // right limit minus node value
};

// Map q's grid-aligned discontinuities to profile nodes; scale transforms a
// potential breakpoint into the profile's abscissa (2 for the t = 2*alpha
// grid of a response kernel).
inline std::vector<NodeCorrection> jump_corrections(const Potential& q, double h,
                                                    std::size_t n, double scale,
                                                    double value_scale) {
  std::vector<NodeCorrection> out;
  for (double bp : q.breakpoints()) {
    const double pos = bp * scale / h;
    const auto idx = static_cast<std::size_t>(std::llround(pos));
    if (idx > n || std::abs(pos - static_cast<double>(idx)) > 1e-9 * std::max(1.0, pos)) {
      continue;  // unaligned jump: no node correction applies
    }
    NodeCorrection c;
    c.idx = idx;
    c.dl = (q.eval_left(bp) - q.eval(bp)) * value_scale;
    c.dr = (q.eval_right(bp) - q.eval(bp)) * value_scale;
    if (c.dl != 0.0 || c.dr != 0.0) out.push_back(c);
  }
  return out;
}

// Jump-aware composite trapezoid of values[j] * exp(rate * t_j) over the
// sub-grid j = 0, stride, 2*stride, ..., jmax.
inline std::complex<double> laplace_trapezoid(
    const std::vector<double>& values, double h, std::complex<double> rate,
    const std::vector<NodeCorrection>& corrections, std::size_t stride,
    std::size_t jmax) {
  const double hs = h * static_cast<double>(stride);
  std::complex<double> acc = 0.0;
  for (std::size_t j = 0; j <= jmax; j += stride) {
    const double t = h * static_cast<double>(j);
    const std::complex<double> e = std::exp(rate * t);
    const double w = (j == 0 || j == jmax) ? 0.5 : 1.0;
    acc += w * values[j] * e;
  }
  acc *= hs;
  for (const auto& c : corrections) {
    if (c.idx > jmax || c.idx % stride != 0) continue;
    const double t = h * static_cast<double>(c.idx);
    const std::complex<double> e = std::exp(rate * t);
    double d = 0.0;
    if (c.idx == 0) {
      d = c.dr;
    } else if (c.idx == jmax) {
      d = c.dl;
    } else {
      d = c.dl + c.dr;
    }
    acc += 0.5 * hs * d * e;
  }
  return acc;
}

struct LaplaceResult {
  std::complex<double> integral;
  double estimate = 0.0;
};

inline LaplaceResult laplace_with_estimate(
    const std::vector<double>& values, double h, std::complex<double> rate,
    const std::vector<NodeCorrection>& corrections) {
  const std::size_t n = values.size() - 1;
  LaplaceResult r;
  r.integral = laplace_trapezoid(values, h, rate, corrections, 1, n);
  if (n >= 2) {
    const std::size_t ne = n - (n % 2);
    const std::complex<double> fine =
        laplace_trapezoid(values, h, rate, corrections, 1, ne);
    const std::complex<double> coarse =
        laplace_trapezoid(values, h, rate, corrections, 2, ne);
    r.estimate = std::abs(fine - coarse) / 3.0;
  }
  return r;
}

inline void require_above_threshold(const Potential& q, std::complex<double> k,
                                    bool enforce) {
  if (!(k.real() > convergence_threshold(q.local_l1_norm())) && enforce) {
    throw domain_violation(
        "m evaluation: Re k is below the convergence threshold "
        "2*max{sqrt(2||q||), e||q||}");
  }
}

}  // namespace detail

// m(-k^2) = -k - int_0^{alpha_max} A(alpha) e^{-2 alpha k} d alpha, with the
// certified truncation bound attached and a Richardson h-vs-2h comparison as
// the quadrature estimate. With enforce_threshold = false an evaluation
// below the threshold is computed anyway and carries an infinite tail bound.
inline MEvaluation m_from_amplitude(const AmplitudeProfile& A, const Potential& q,
                                    std::complex<double> k,
                                    bool enforce_threshold = true) {
  if (A.samples.size() < 2) throw config_error("m_from_amplitude: profile too short");
  detail::require_above_threshold(q, k, enforce_threshold);
  const auto corrections =
      detail::jump_corrections(q, A.h, A.samples.size() - 1, 1.0, 1.0);
  const auto lap =
      detail::laplace_with_estimate(A.samples, A.h, -2.0 * k, corrections);
  MEvaluation ev;
  ev.k = k;
  ev.alpha_max = A.alpha_max();
  ev.m = -k - lap.integral;
  ev.quadrature_estimate = lap.estimate;
  ev.tail_bound = (k.real() > convergence_threshold(q.local_l1_norm()))
                      ? tail_bound(q, ev.alpha_max, k)
                      : std::numeric_limits<double>::infinity();
  return ev;
}

// m(-k^2) = -k + int_0^{t_max} e^{-k t} r(t) dt; algebraically the same
// integral after t = 2*alpha, kept as an independent consistency path.
inline MEvaluation m_from_response(const ResponseKernel& r, const Potential& q,
                                   std::complex<double> k,
                                   bool enforce_threshold = true) {
  if (r.samples.size() < 2) throw config_error("m_from_response: kernel too short");
  detail::require_above_threshold(q, k, enforce_threshold);
  const auto corrections =
      detail::jump_corrections(q, r.h_t, r.samples.size() - 1, 2.0, -0.5);
  const auto lap = detail::laplace_with_estimate(r.samples, r.h_t, -k, corrections);
  MEvaluation ev;
  ev.k = k;
  ev.alpha_max = 0.5 * r.t_max();
  ev.m = -k + lap.integral;
  ev.quadrature_estimate = lap.estimate;
  ev.tail_bound = (k.real() > convergence_threshold(q.local_l1_norm()))
                      ? tail_bound(q, ev.alpha_max, k)
                      : std::numeric_limits<double>::infinity();
  return ev;
}

// Residual of the large-k law m(-k^2) = -k - q(0)/(2k) + o(1/k):
// |k (m + k) + q(0)/2|.
inline double asymptotic_residual(double q0, double k, std::complex<double> m) {
  if (!(k > 0)) throw config_error("asymptotic_residual: k must be positive");
  return std::abs(k * (m + k) + 0.5 * q0);
}

// Diagnostic: m maps the upper half plane to itself, so sign(Im m) must
// match sign(Im z) for z = -k^2.
inline HerglotzReport herglotz_check(std::complex<double> m,
                                     std::complex<double> k) {
  const std::complex<double> z = -k * k;
  if (z.imag() == 0.0) {
    throw config_error("herglotz_check: Im(-k^2) must be nonzero");
  }
  HerglotzReport rep;
  rep.im_z = z.imag();
  rep.im_m = m.imag();
  auto sgn = [](double x) { return (x > 0) - (x < 0); };
  rep.sign_agrees = sgn(rep.im_z) == sgn(rep.im_m);
  return rep;
}

}  // namespace weylbc

#pragma once

#include <cmath>
#include <limits>

#include "weylbc/errors.hpp"
#include "weylbc/potential.hpp"

namespace weylbc {

// Relative slack used when comparing a measured deviation against a bound;
// absorbs roundoff in the exponentials without masking real violations.
inline constexpr double kBoundSlack = 1e-9;

struct BoundReport {
  double alpha = 0.0;
  double lhs = 0.0;  // measured |A(alpha) - q(alpha)|
  double rhs = 0.0;  // tightest applicable a-priori bound
  bool satisfied = false;
};

// int_0^a (x+b)^n f(x) dx <= (a+b+1)^{n+1}/(n+1) * ||f||
// for non-negative f with finite local-L1 norm.
inline double weighted_moment_bound(double norm_f, double a, double b, int n) {
  if (!(norm_f >= 0) || !(a >= 0) || !(b >= 0) || n < 1) {
    throw config_error("weighted_moment_bound: requires norm_f,a,b >= 0 and n >= 1");
  }
  return std::pow(a + b + 1.0, n + 1) / static_cast<double>(n + 1) * norm_f;
}

// Exponential a-priori bound on |A(alpha) - q(alpha)| valid whenever
// ||q|| < inf:
//   (1/2) Q(alpha)^2 { exp(2*sqrt(2)*sqrt(||q||)*alpha)
//                      + exp(2*e*||q||*alpha)/sqrt(2*pi) }.
inline double amplitude_bound(const Potential& q, double alpha) {
  if (!(alpha >= 0)) throw config_error("amplitude_bound: alpha must be >= 0");
  const double norm = q.local_l1_norm();
  if (!std::isfinite(norm)) {
    throw config_error("amplitude_bound: potential has infinite local-L1 norm");
  }
  const double Q = q.cumulative_abs(alpha);
  const double twopi = 6.28318530717958647692;
  const double e1 = std::exp(2.0 * std::sqrt(2.0) * std::sqrt(norm) * alpha);
  const double e2 = std::exp(2.0 * std::exp(1.0) * norm * alpha);
  return 0.5 * Q * Q * (e1 + e2 / std::sqrt(twopi));
}

// Sharper bound Q(alpha)^2 * exp(alpha*Q(alpha)) for integrable q.
inline double amplitude_bound_l1(const Potential& q, double alpha) {
  if (!(alpha >= 0)) throw config_error("amplitude_bound_l1: alpha must be >= 0");
  if (!q.integrable()) {
    throw config_error("amplitude_bound_l1: potential is not integrable");
  }
  const double Q = q.cumulative_abs(alpha);
  return Q * Q * std::exp(alpha * Q);
}

// Sharper bound for bounded q:
//   sup|q| * sum_{n>=1} sup|q|^n alpha^{2n} / (n! (n+1)!),
// summed until the term drops below 1e-16 relative. No ordering against the
// exponential bound holds in general; the two cover different regimes.
inline double amplitude_bound_linf(double sup_q, double alpha) {
  if (!(sup_q >= 0) || !(alpha >= 0)) {
    throw config_error("amplitude_bound_linf: requires sup_q, alpha >= 0");
  }
  const double x = sup_q * alpha * alpha;
  double term = x / 2.0;  // n = 1
  double sum = term;
  for (int n = 1; n < 400 && term > 1e-16 * sum; ++n) {
    term *= x / (static_cast<double>(n + 1) * static_cast<double>(n + 2));
    sum += term;
  }
  return sup_q * sum;
}

// Majorant for the tail of the alternating iterate series once terms
// 1..terms_done have been summed:
//   Q(alpha)^2 * sum_{m >= terms_done} alpha^m (alpha+m)^m ||q||^m / (m!)^2.
inline double neumann_remainder_majorant(const Potential& q, double alpha,
                                         int terms_done) {
  if (!(alpha >= 0) || terms_done < 0) {
    throw config_error("neumann_remainder_majorant: bad arguments");
  }
  const double Q = q.cumulative_abs(alpha);
  if (Q == 0.0) return 0.0;
  const double norm = q.local_l1_norm();
  double sum = 0.0;
  for (int m = terms_done; m < terms_done + 400; ++m) {
    double term;
    if (m == 0) {
      term = 1.0;
    } else {
      const double lg = m * std::log(alpha) + m * std::log(alpha + m) +
                        m * std::log(norm) - 2.0 * std::lgamma(m + 1.0);
      term = std::exp(lg);
    }
    sum += term;
    if (term < 1e-18 * std::max(sum, 1e-300)) break;
  }
  return Q * Q * sum;
}

}  // namespace weylbc

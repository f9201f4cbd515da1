#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "weylbc/errors.hpp"
#include "weylbc/potential.hpp"

namespace weylbc {

// J_1 by power series up to x = 12 and the Hankel asymptotic expansion
// beyond; relative accuracy ~1e-12 over the crossover.
inline double bessel_j1(double x) {
  const double ax = std::abs(x);
  const double sign = (x < 0) ? -1.0 : 1.0;
  if (ax <= 12.0) {
    const double m4 = -0.25 * ax * ax;
    double term = 0.5 * ax;
    double sum = term;
    for (int m = 1; m < 80; ++m) {
      term *= m4 / (static_cast<double>(m) * static_cast<double>(m + 1));
      sum += term;
      if (std::abs(term) < 1e-20 * std::abs(sum)) break;
    }
    return sign * sum;
  }
  const double pi = 3.14159265358979323846;
  const double mu = 4.0;  // 4*nu^2 for nu = 1
  double ak = 1.0;
  double p = 1.0, qq = 0.0;
  for (int k = 1; k <= 14; ++k) {
    const double odd = 2.0 * k - 1.0;
    ak *= (mu - odd * odd) / (8.0 * k);
    const double t = ak / std::pow(ax, k);
    switch (k % 4) {
      case 1: qq += t; break;
      case 2: p -= t; break;
      case 3: qq -= t; break;
      case 0: p += t; break;
    }
  }
  const double chi = ax - 0.75 * pi;
  return sign * std::sqrt(2.0 / (pi * ax)) * (p * std::cos(chi) - qq * std::sin(chi));
}

// A-amplitude of the untruncated constant potential q = c > 0:
//   A(alpha) = sqrt(c) J_1(2 sqrt(c) alpha) / alpha, with A(0) = c.
inline double closed_form_amplitude(double c, double alpha) {
  if (!(c > 0)) throw config_error("closed_form_amplitude: requires c > 0");
  if (!(alpha >= 0)) throw config_error("closed_form_amplitude: alpha must be >= 0");
  const double s = std::sqrt(c);
  if (alpha == 0.0) return c;
  if (2.0 * s * alpha < 1e-8) {
    // series limit to avoid 0/0 amplification
    const double t = s * alpha;
    return c * (1.0 - 0.5 * t * t);
  }
  return s * bessel_j1(2.0 * s * alpha) / alpha;
}

// m(-k^2) = -sqrt(k^2 + c) for q = c on the whole half line.
inline std::complex<double> closed_form_m_constant(double c,
                                                   std::complex<double> k) {
  const std::complex<double> kappa = std::sqrt(k * k + c);
  if (!(kappa.real() > 0)) {
    throw domain_violation("closed_form_m_constant: sqrt branch has Re <= 0");
  }
  return -kappa;
}

// m(-k^2) for the box q = c on [0, w), zero beyond, by matching the interior
// solution against e^{-kx} at x = w.
inline std::complex<double> closed_form_m_box(double c, double w,
                                              std::complex<double> k) {
  if (!(w >= 0)) throw config_error("closed_form_m_box: width must be >= 0");
  const std::complex<double> kappa = std::sqrt(k * k + c);
  if (!(kappa.real() > 0)) {
    throw domain_violation("closed_form_m_box: sqrt branch has Re <= 0");
  }
  const std::complex<double> sh = std::sinh(kappa * w);
  const std::complex<double> ch = std::cosh(kappa * w);
  return -kappa * (kappa * sh + k * ch) / (kappa * ch + k * sh);
}

enum class OracleMethod { riccati, closed_form };

struct OracleConfig {
  double x_far = 10.0;  // truncation point; q must be negligible beyond
  double step = 1e-4;   // integration step bound
  OracleMethod method = OracleMethod::riccati;
};

// Direct evaluation of m(-k^2) from the defining boundary-value problem:
// integrate the logarithmic-derivative flow m'(x) = q(x) - z - m(x)^2
// backward from x_far with m(x_far) = -k, the exact value for the
// zero-extended tail. Classical RK4 with steps aligned to q's
// discontinuities; one-sided q values are used at segment endpoints so each
// segment sees a smooth right-hand side.
inline std::complex<double> m_riccati(const Potential& q,
                                      std::complex<double> k,
                                      const OracleConfig& cfg) {
  if (!(k.real() > 0)) throw config_error("m_riccati: requires Re k > 0");
  if (!(cfg.x_far > 0) || !(cfg.step > 0)) {
    throw config_error("m_riccati: x_far and step must be positive");
  }
  if (cfg.x_far < q.support_end() && std::abs(q.eval(cfg.x_far)) > 1e-12) {
    throw config_error(
        "m_riccati: support violation, q is not negligible at x_far");
  }

  const std::complex<double> z = -k * k;
  std::complex<double> m = -k;

  std::vector<double> nodes;
  nodes.push_back(0.0);
  for (double b : q.breakpoints()) {
    if (b > 0 && b < cfg.x_far) nodes.push_back(b);
  }
  nodes.push_back(cfg.x_far);
  std::sort(nodes.begin(), nodes.end());

  for (std::size_t seg = nodes.size() - 1; seg >= 1; --seg) {
    const double a = nodes[seg - 1];
    const double b = nodes[seg];
    if (!(b > a)) continue;
    const auto nsteps = static_cast<std::size_t>(
        std::ceil((b - a) / cfg.step - 1e-9));
    const double hs = (b - a) / static_cast<double>(std::max<std::size_t>(nsteps, 1));
    const double eps = 1e-9 * hs;
    auto qs = [&](double x) {
      if (x >= b - eps) return q.eval_left(b);
      if (x <= a + eps) return q.eval_right(a);
      return q.eval(x);
    };
    auto f = [&](double x, std::complex<double> mm) {
      return qs(x) - z - mm * mm;
    };
    double x = b;
    for (std::size_t s = 0; s < std::max<std::size_t>(nsteps, 1); ++s) {
      const std::complex<double> k1 = f(x, m);
      const std::complex<double> k2 = f(x - 0.5 * hs, m - 0.5 * hs * k1);
      const std::complex<double> k3 = f(x - 0.5 * hs, m - 0.5 * hs * k2);
      const std::complex<double> k4 = f(x - hs, m - hs * k3);
      m -= hs / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      x -= hs;
      if (std::abs(m) > 1e8) {
        throw solver_error(
            "m_riccati: blow-up during backward integration; reduce the step "
            "or move k away from the spectrum");
      }
    }
  }
  return m;
}

// Dispatch on the configured oracle route. The closed-form route covers the
// constant and box kinds (a truncated constant is a box).
inline std::complex<double> oracle_m(const Potential& q, std::complex<double> k,
                                     const OracleConfig& cfg) {
  if (cfg.method == OracleMethod::riccati) return m_riccati(q, k, cfg);
  if (const auto* c = std::get_if<ConstantPotential>(&q.kind())) {
    if (std::isinf(q.extent())) return closed_form_m_constant(c->c, k);
    return closed_form_m_box(c->c, q.extent(), k);
  }
  if (const auto* b = std::get_if<BoxPotential>(&q.kind())) {
    return closed_form_m_box(b->height, std::min(b->width, q.extent()), k);
  }
  throw config_error("oracle_m: no closed form for kind '" + q.kind_name() + "'");
}

}  // namespace weylbc

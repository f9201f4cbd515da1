#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "weylbc/amplitude.hpp"
#include "weylbc/errors.hpp"

namespace weylbc {

// Convolution kernel r(t) of the dynamic Dirichlet-to-Neumann map, sampled
// on t = j*h_t over [0, 2*X]. Satisfies r(0) = -q(0)/2 and A(alpha) =
// -2 r(2 alpha).
struct ResponseKernel {
  double h_t = 0.0;
  std::vector<double> samples;

  std::size_t size() const { return samples.size(); }
  double t_max() const {
    return samples.empty() ? 0.0 : h_t * static_cast<double>(samples.size() - 1);
  }
};

// Dirichlet boundary data f(t) driving the wave system from rest; f(0) = 0.
// When built from an analytic control the exact derivative samples ride
// along, otherwise differentiation is numeric (second order).
struct BoundaryControl {
  double h_t = 0.0;
  std::vector<double> samples;
  std::vector<double> derivative;  // empty => numeric differentiation

  static BoundaryControl from_samples(double h_t, std::vector<double> values) {
    if (!(h_t > 0)) throw config_error("boundary control: h_t must be > 0");
    if (values.size() < 3) {
      throw config_error("boundary control: need at least 3 samples");
    }
    if (values.front() != 0.0) {
      throw config_error("boundary control: f(0) must be 0");
    }
    BoundaryControl f;
    f.h_t = h_t;
    f.samples = std::move(values);
    return f;
  }

  template <typename F, typename DF>
  static BoundaryControl from_function(F&& fn, DF&& dfn, double h_t,
                                       std::size_t n) {
    std::vector<double> v(n + 1), d(n + 1);
    for (std::size_t j = 0; j <= n; ++j) {
      const double t = h_t * static_cast<double>(j);
      v[j] = fn(t);
      d[j] = dfn(t);
    }
    BoundaryControl f = from_samples(h_t, std::move(v));
    f.derivative = std::move(d);
    return f;
  }

  static BoundaryControl sine(double h_t, std::size_t n, double omega = 1.0) {
    return from_function([omega](double t) { return std::sin(omega * t); },
                         [omega](double t) { return omega * std::cos(omega * t); },
                         h_t, n);
  }

  static BoundaryControl ramp(double h_t, std::size_t n) {
    return from_function([](double t) { return t; }, [](double) { return 1.0; },
                         h_t, n);
  }

  bool analytic_derivative() const { return !derivative.empty(); }

  double t_max() const {
    return samples.empty() ? 0.0 : h_t * static_cast<double>(samples.size() - 1);
  }

  // linear interpolation between samples; arguments within an ulp of the
  // range are snapped to it
  double interp(double t) const {
    if (t < 0 && t >= -1e-12 * std::max(1.0, t_max())) t = 0.0;
    if (t < 0 || t > t_max() * (1.0 + 1e-12)) {
      throw config_error("boundary control: evaluation outside the sampled range");
    }
    const double u = std::min(t / h_t, static_cast<double>(samples.size() - 1));
    const auto j = static_cast<std::size_t>(u);
    if (j + 1 >= samples.size()) return samples.back();
    const double frac = u - static_cast<double>(j);
    return samples[j] + frac * (samples[j + 1] - samples[j]);
  }

  // f'(t_j): analytic when available, otherwise centered differences with
  // one-sided second-order stencils at the ends.
  double derivative_at(std::size_t j) const {
    if (!derivative.empty()) return derivative[j];
    const std::size_t last = samples.size() - 1;
    if (j == 0) {
      return (-3.0 * samples[0] + 4.0 * samples[1] - samples[2]) / (2.0 * h_t);
    }
    if (j == last) {
      return (3.0 * samples[last] - 4.0 * samples[last - 1] + samples[last - 2]) /
             (2.0 * h_t);
    }
    return (samples[j + 1] - samples[j - 1]) / (2.0 * h_t);
  }
};

// r(t) = -A(t/2)/2 on t = 2 * (alpha grid).
inline ResponseKernel response_kernel_from_amplitude(const AmplitudeProfile& A) {
  ResponseKernel r;
  r.h_t = 2.0 * A.h;
  r.samples.resize(A.samples.size());
  for (std::size_t j = 0; j < A.samples.size(); ++j) {
    r.samples[j] = -0.5 * A.samples[j];
  }
  return r;
}

// (Rf)(t) = -f'(t) + int_0^t r(t-s) f(s) ds on the shared grid.
inline std::vector<double> apply_response_operator(const ResponseKernel& r,
                                                   const BoundaryControl& f) {
  if (r.samples.empty()) throw config_error("apply_response_operator: empty kernel");
  if (std::abs(r.h_t - f.h_t) > 1e-12 * std::max(1.0, r.h_t)) {
    throw config_error("apply_response_operator: kernel and control grids differ");
  }
  const std::size_t n = std::min(r.samples.size(), f.samples.size()) - 1;
  std::vector<double> out(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    double conv = 0.0;
    if (i >= 1) {
      conv += 0.5 * (r.samples[i] * f.samples[0] + r.samples[0] * f.samples[i]);
      for (std::size_t l = 1; l < i; ++l) {
        conv += r.samples[i - l] * f.samples[l];
      }
      conv *= r.h_t;
    }
    out[i] = -f.derivative_at(i) + conv;
  }
  return out;
}

}  // namespace weylbc

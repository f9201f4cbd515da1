#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <variant>
#include <vector>

#include "weylbc/errors.hpp"

namespace weylbc {

inline constexpr double kUnbounded = std::numeric_limits<double>::infinity();

// q(x) = c
struct ConstantPotential {
  double c = 0.0;
};

// q(x) = height on [0, width), 0 beyond
struct BoxPotential {
  double height = 0.0;
  double width = 0.0;
};

// q(x) = amplitude * exp(-rate * x)
struct ExpDecayPotential {
  double amplitude = 0.0;
  double rate = 1.0;
};

// q(x) = x^{-decay} * sin(x^{power}), 0 < decay <= power <= 1
struct OscillatoryDecayPotential {
  double decay = 0.5;
  double power = 1.0;
};

// piecewise constant on a uniform grid starting at 0, right-continuous:
// q = values[i] on [i*step, (i+1)*step)
struct SampledPotential {
  double step = 1.0;
  std::vector<double> values;
};

namespace detail {

template <typename F>
double adaptive_simpson_rec(F& f, double a, double b, double fa, double fm,
                            double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

template <typename F>
double adaptive_simpson(F&& f, double a, double b, double tol) {
  if (!(b > a)) return 0.0;
  const double fa = f(a);
  const double m = 0.5 * (a + b);
  const double fm = f(m);
  const double fb = f(b);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, tol, 40);
}

// Maximum of a continuous scalar function by golden-section refinement
// around the best point of a scan grid.
template <typename F>
double golden_max(F&& f, double lo, double hi, double tol = 1e-12) {
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = lo, b = hi;
  double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > tol * std::max(1.0, std::abs(a) + std::abs(b))) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + gr * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - gr * (b - a);
      f1 = f(x1);
    }
  }
  return std::max(f1, f2);
}

}  // namespace detail

// A potential q on the half line. Evaluation is defined for all x >= 0 and
// the value is exactly zero for x > extent(). Values are immutable after
// construction; every member is pure and safe to call concurrently.
class Potential {
 public:
  using Kind = std::variant<ConstantPotential, BoxPotential, ExpDecayPotential,
                            OscillatoryDecayPotential, SampledPotential>;

  static Potential zero() { return constant(0.0); }

  static Potential constant(double c, double x_max = kUnbounded) {
    require_finite_param(c, "constant potential: c");
    return Potential(ConstantPotential{c}, x_max);
  }

  static Potential box(double height, double width, double x_max = kUnbounded) {
    require_finite_param(height, "box potential: height");
    require_finite_param(width, "box potential: width");
    if (!(width >= 0)) throw config_error("box potential: width must be >= 0");
    return Potential(BoxPotential{height, width}, x_max);
  }

  static Potential exp_decay(double amplitude, double rate,
                             double x_max = kUnbounded) {
    require_finite_param(amplitude, "exp_decay potential: amplitude");
    require_finite_param(rate, "exp_decay potential: rate");
    if (!(rate > 0)) throw config_error("exp_decay potential: rate must be > 0");
    return Potential(ExpDecayPotential{amplitude, rate}, x_max);
  }

  // q(x) = x^{-decay} sin(x^{power}), restricted to 0 < decay <= power <= 1
  // so that q stays bounded near the origin.
  static Potential oscillatory_decay(double decay, double power,
                                     double x_max = kUnbounded) {
    require_finite_param(decay, "oscillatory_decay potential: decay");
    require_finite_param(power, "oscillatory_decay potential: power");
    if (!(decay > 0 && decay <= power && power <= 1)) {
      throw config_error(
          "oscillatory_decay potential: parameters must satisfy "
          "0 < decay <= power <= 1");
    }
    return Potential(OscillatoryDecayPotential{decay, power}, x_max);
  }

  static Potential sampled(double step, std::vector<double> values) {
    if (!(step > 0) || !std::isfinite(step)) {
      throw config_error("sampled potential: step must be positive and finite");
    }
    if (values.empty()) {
      throw config_error("sampled potential: values must be non-empty");
    }
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (!std::isfinite(values[i])) {
        throw config_error("sampled potential: non-finite value at index " +
                           std::to_string(i));
      }
    }
    const double x_max = step * static_cast<double>(values.size());
    return Potential(SampledPotential{step, std::move(values)}, x_max);
  }

  // q(x). Right-continuous at interior jumps; at a finite extent() the point
  // itself still carries the kind value (zero strictly beyond).
  double eval(double x) const {
    assert(x >= -1e-12);
    if (x < 0) x = 0;
    if (x > x_max_) return 0.0;
    return kind_value(x);
  }

  // lim_{s -> x-} q(s); equals eval(x) except at jump points.
  double eval_left(double x) const {
    if (x <= 0) return eval(0.0);
    if (x > x_max_) return 0.0;
    if (const auto* b = std::get_if<BoxPotential>(&kind_)) {
      return (x <= b->width) ? b->height : 0.0;
    }
    if (const auto* s = std::get_if<SampledPotential>(&kind_)) {
      const double t = x / s->step;
      double j = std::floor(t + 1e-9);
      if (std::abs(t - j) <= 1e-9 * std::max(1.0, t)) j -= 1.0;  // on a breakpoint
      if (j < 0) j = 0;
      const auto idx = static_cast<std::size_t>(j);
      return idx < s->values.size() ? s->values[idx] : 0.0;
    }
    return kind_value(x);
  }

  // lim_{s -> x+} q(s); equals eval(x) except at a finite truncation point.
  double eval_right(double x) const {
    if (x < 0) x = 0;
    if (x >= x_max_) return 0.0;
    return kind_value(x);
  }

  // Q(alpha) = int_0^alpha |q|; closed form except for the oscillatory kind,
  // where adaptive quadrature with absolute tolerance 1e-10 is used.
  double cumulative_abs(double alpha) const {
    if (!(alpha >= 0)) throw config_error("cumulative_abs: alpha must be >= 0");
    return cumulative_impl(alpha, /*absolute=*/true);
  }

  // int_0^alpha q (signed), same evaluation strategy as cumulative_abs.
  double cumulative(double alpha) const {
    if (!(alpha >= 0)) throw config_error("cumulative: alpha must be >= 0");
    return cumulative_impl(alpha, /*absolute=*/false);
  }

  // ||q|| = sup_x int_x^{x+1} |q|.
  double local_l1_norm() const { return norm_window_; }

  // sup_x |q(x)|.
  double sup_norm() const { return norm_sup_; }

  // True when int_0^inf |q| is finite.
  bool integrable() const { return std::isfinite(total_abs_); }

  // Q(inf); +inf when q is not integrable.
  double total_abs() const { return total_abs_; }

  // Smallest point beyond which q vanishes identically; +inf if none.
  double support_end() const { return support_end_; }

  // Truncation point: q(x) = 0 for all x > extent().
  double extent() const { return x_max_; }

  // Interior discontinuity locations in (0, extent()], sorted ascending.
  // Includes a finite truncation point when the kind value there is nonzero.
  std::vector<double> breakpoints() const {
    std::vector<double> bp;
    if (const auto* b = std::get_if<BoxPotential>(&kind_)) {
      if (b->height != 0.0 && b->width > 0 && b->width < x_max_) {
        bp.push_back(b->width);
      }
    } else if (const auto* s = std::get_if<SampledPotential>(&kind_)) {
      for (std::size_t i = 1; i <= s->values.size(); ++i) {
        const double x = s->step * static_cast<double>(i);
        if (x > x_max_) break;
        bp.push_back(x);
      }
    }
    if (std::isfinite(x_max_) && x_max_ > 0 && kind_value(x_max_) != 0.0) {
      if (bp.empty() || bp.back() < x_max_) bp.push_back(x_max_);
    }
    return bp;
  }

  const Kind& kind() const { return kind_; }

  std::string kind_name() const {
    if (std::holds_alternative<ConstantPotential>(kind_)) return "constant";
    if (std::holds_alternative<BoxPotential>(kind_)) return "box";
    if (std::holds_alternative<ExpDecayPotential>(kind_)) return "exp_decay";
    if (std::holds_alternative<OscillatoryDecayPotential>(kind_)) {
      return "oscillatory_decay";
    }
    return "sampled";
  }

 private:
  Potential(Kind kind, double x_max) : kind_(std::move(kind)), x_max_(x_max) {
    if (std::isnan(x_max_) || x_max_ < 0) {
      throw config_error("potential: x_max must be >= 0");
    }
    if (const auto* s = std::get_if<SampledPotential>(&kind_)) {
      x_max_ = std::min(x_max_, s->step * static_cast<double>(s->values.size()));
    }
    compute_cached();
  }

  static void require_finite_param(double v, const char* what) {
    if (!std::isfinite(v)) throw config_error(std::string(what) + " must be finite");
  }

  double kind_value(double x) const {
    if (const auto* c = std::get_if<ConstantPotential>(&kind_)) return c->c;
    if (const auto* b = std::get_if<BoxPotential>(&kind_)) {
      return (x < b->width) ? b->height : 0.0;
    }
    if (const auto* e = std::get_if<ExpDecayPotential>(&kind_)) {
      return e->amplitude * std::exp(-e->rate * x);
    }
    if (const auto* o = std::get_if<OscillatoryDecayPotential>(&kind_)) {
      if (x <= 0.0) return (o->power > o->decay) ? 0.0 : 1.0;
      return std::pow(x, -o->decay) * std::sin(std::pow(x, o->power));
    }
    const auto& s = std::get<SampledPotential>(kind_);
    const double t = x / s.step;
    const double j = std::floor(t + 1e-9);
    if (j < 0) return s.values.front();
    const auto idx = static_cast<std::size_t>(j);
    return idx < s.values.size() ? s.values[idx] : 0.0;
  }

  double cumulative_impl(double alpha, bool absolute) const {
    const double a = std::min(alpha, x_max_);
    if (a <= 0) return 0.0;
    if (const auto* c = std::get_if<ConstantPotential>(&kind_)) {
      return (absolute ? std::abs(c->c) : c->c) * a;
    }
    if (const auto* b = std::get_if<BoxPotential>(&kind_)) {
      const double len = std::min(a, b->width);
      return (absolute ? std::abs(b->height) : b->height) * len;
    }
    if (const auto* e = std::get_if<ExpDecayPotential>(&kind_)) {
      const double amp = absolute ? std::abs(e->amplitude) : e->amplitude;
      return amp / e->rate * (1.0 - std::exp(-e->rate * a));
    }
    if (std::holds_alternative<OscillatoryDecayPotential>(kind_)) {
      return oscillatory_cumulative(a, absolute);
    }
    const auto& s = std::get<SampledPotential>(kind_);
    double acc = 0.0;
    const auto full = static_cast<std::size_t>(std::floor(a / s.step + 1e-12));
    const std::size_t ncells = std::min(full, s.values.size());
    for (std::size_t i = 0; i < ncells; ++i) {
      acc += (absolute ? std::abs(s.values[i]) : s.values[i]) * s.step;
    }
    if (full < s.values.size()) {
      const double rest = a - static_cast<double>(full) * s.step;
      if (rest > 0) {
        const double v = s.values[full];
        acc += (absolute ? std::abs(v) : v) * rest;
      }
    }
    return acc;
  }

  // Integrate the oscillatory kind piecewise between the zeros of
  // sin(x^power), where |q| is smooth.
  double oscillatory_cumulative(double a, bool absolute) const {
    const auto& o = std::get<OscillatoryDecayPotential>(kind_);
    auto f = [&](double x) {
      const double v = kind_value(x);
      return absolute ? std::abs(v) : v;
    };
    const double pi = 3.14159265358979323846;
    double acc = 0.0;
    double lo = 0.0;
    for (int n = 1; lo < a; ++n) {
      const double z = std::pow(static_cast<double>(n) * pi, 1.0 / o.power);
      const double hi = std::min(z, a);
      acc += detail::adaptive_simpson(f, lo, hi, 1e-10);
      lo = hi;
    }
    return acc;
  }

  // Sliding-window integral W(x) = int_x^{x+1} |q|.
  double window_integral(double x) const {
    return cumulative_impl(x + 1.0, true) - cumulative_impl(x, true);
  }

  void compute_cached() {
    const double inf = kUnbounded;
    if (const auto* c = std::get_if<ConstantPotential>(&kind_)) {
      const double ac = std::abs(c->c);
      norm_window_ = ac * std::min(1.0, x_max_);
      norm_sup_ = (x_max_ > 0 || std::isinf(x_max_)) ? ac : 0.0;
      total_abs_ = (ac == 0.0) ? 0.0 : ac * x_max_;  // inf when untruncated
      support_end_ = (ac == 0.0) ? 0.0 : x_max_;
      return;
    }
    if (const auto* b = std::get_if<BoxPotential>(&kind_)) {
      const double ah = std::abs(b->height);
      const double weff = std::min(b->width, x_max_);
      norm_window_ = ah * std::min(1.0, weff);
      norm_sup_ = (weff > 0) ? ah : 0.0;
      total_abs_ = ah * weff;
      support_end_ = (ah == 0.0) ? 0.0 : weff;
      return;
    }
    if (const auto* e = std::get_if<ExpDecayPotential>(&kind_)) {
      const double aa = std::abs(e->amplitude);
      // |q| is decreasing, so the window maximum sits at x = 0
      norm_window_ = aa / e->rate * (1.0 - std::exp(-e->rate * std::min(1.0, x_max_)));
      norm_sup_ = aa;
      total_abs_ = aa / e->rate *
                   (std::isinf(x_max_) ? 1.0 : 1.0 - std::exp(-e->rate * x_max_));
      support_end_ = (aa == 0.0) ? 0.0 : x_max_;
      return;
    }
    if (std::holds_alternative<OscillatoryDecayPotential>(kind_)) {
      compute_oscillatory_cached();
      total_abs_ = std::isfinite(x_max_) ? cumulative_impl(x_max_, true) : inf;
      support_end_ = x_max_;
      return;
    }
    const auto& s = std::get<SampledPotential>(kind_);
    norm_sup_ = 0.0;
    total_abs_ = 0.0;
    std::size_t last_nonzero = 0;
    bool any_nonzero = false;
    for (std::size_t i = 0; i < s.values.size(); ++i) {
      norm_sup_ = std::max(norm_sup_, std::abs(s.values[i]));
      total_abs_ += std::abs(s.values[i]) * s.step;
      if (s.values[i] != 0.0) {
        any_nonzero = true;
        last_nonzero = i;
      }
    }
    support_end_ =
        any_nonzero
            ? std::min(x_max_, s.step * static_cast<double>(last_nonzero + 1))
            : 0.0;
    // W(x) is piecewise linear with kinks where x or x+1 crosses a cell
    // boundary, so its maximum is attained at one of those points.
    norm_window_ = 0.0;
    const double end = s.step * static_cast<double>(s.values.size());
    std::vector<double> candidates;
    candidates.push_back(0.0);
    for (std::size_t i = 0; i <= s.values.size(); ++i) {
      const double x = s.step * static_cast<double>(i);
      candidates.push_back(std::min(x, end));
      if (x - 1.0 > 0) candidates.push_back(x - 1.0);
    }
    for (double x : candidates) {
      norm_window_ = std::max(norm_window_, window_integral(x));
    }
  }

  void compute_oscillatory_cached() {
    const auto& o = std::get<OscillatoryDecayPotential>(kind_);
    const double pi = 3.14159265358979323846;
    auto absq = [&](double x) { return std::abs(eval(x)); };
    // sup|q|: first antinodes carry the global maximum; scan them plus the
    // near-origin region, then refine.
    const double first_antinode = std::pow(0.5 * pi, 1.0 / o.power);
    double hi = std::min(x_max_, std::max(8.0, 3.0 * first_antinode));
    double best_x = 0.0, best = absq(0.0);
    const int nscan = 4000;
    for (int i = 1; i <= nscan; ++i) {
      const double x = hi * static_cast<double>(i) / nscan;
      const double v = absq(x);
      if (v > best) {
        best = v;
        best_x = x;
      }
    }
    const double span = hi / nscan;
    norm_sup_ = std::max(
        best, detail::golden_max(absq, std::max(0.0, best_x - span), best_x + span));

    // ||q||: W decays like the x^{-decay} envelope; scan the same range.
    auto W = [&](double x) { return window_integral(x); };
    double bestw_x = 0.0, bestw = W(0.0);
    const int nw = 400;
    for (int i = 1; i <= nw; ++i) {
      const double x = hi * static_cast<double>(i) / nw;
      const double v = W(x);
      if (v > bestw) {
        bestw = v;
        bestw_x = x;
      }
    }
    const double wspan = hi / nw;
    norm_window_ = std::max(
        bestw, detail::golden_max(W, std::max(0.0, bestw_x - wspan), bestw_x + wspan,
                                  1e-10));
  }

  Kind kind_;
  double x_max_ = kUnbounded;
  double norm_window_ = 0.0;
  double norm_sup_ = 0.0;
  double total_abs_ = 0.0;
  double support_end_ = 0.0;
};

}  // namespace weylbc

#pragma once

#include <atomic>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "weylbc/io.hpp"
#include "weylbc/oracle.hpp"
#include "weylbc/weylbc.hpp"

namespace weylbc {

enum class OutputFormat { csv, json };

// Everything a pipeline run needs; the binary in tools/ only parses flags
// into this.
struct RunConfig {
  Potential q = Potential::zero();
  std::string potential_source;  // echoed into reports
  double x_extent = 4.0;         // grid extent X of the kernel solve
  double h = 1.0 / 400.0;
  std::vector<std::complex<double>> ks;
  double tol = 1e-6;             // tail / series tolerance
  AmplitudeMethod method = AmplitudeMethod::march;
  std::string out_dir = ".";
  OutputFormat format = OutputFormat::csv;
  bool allow_unverified = false;
  std::string control_path;
  unsigned threads = 0;          // 0: hardware concurrency
};

namespace detail {

inline std::ofstream open_output(const std::string& dir, const std::string& name) {
  std::filesystem::create_directories(dir);
  const auto path = std::filesystem::path(dir) / name;
  std::ofstream out(path);
  if (!out) throw config_error("cannot open output file " + path.string());
  return out;
}

inline nlohmann::json config_echo(const RunConfig& cfg) {
  nlohmann::json j;
  j["potential"] = cfg.potential_source.empty() ? cfg.q.kind_name()
                                                : cfg.potential_source;
  j["kind"] = cfg.q.kind_name();
  j["x_max"] = std::isfinite(cfg.q.extent()) ? nlohmann::json(cfg.q.extent())
                                             : nlohmann::json("inf");
  j["xmax_grid"] = cfg.x_extent;
  j["step"] = cfg.h;
  j["tol"] = cfg.tol;
  j["method"] = cfg.method == AmplitudeMethod::march ? "march" : "neumann";
  j["norm_q"] = cfg.q.local_l1_norm();
  j["threshold"] = convergence_threshold(cfg.q.local_l1_norm());
  j["allow_unverified"] = cfg.allow_unverified;
  return j;
}

inline AmplitudeProfile compute_profile(const RunConfig& cfg) {
  if (cfg.method == AmplitudeMethod::march) {
    return diagonal_amplitude(solve_kernel_march(cfg.q, cfg.x_extent, cfg.h),
                              cfg.q);
  }
  AmplitudeProfile p = neumann_sum(cfg.q, cfg.x_extent, cfg.h, cfg.tol);
  if (!p.converged) {
    throw solver_error(
        "neumann series did not converge in 64 terms (X*||q|| too large); "
        "use the marching method");
  }
  return p;
}

template <typename F>
void parallel_for(std::size_t count, unsigned threads, F&& body) {
  unsigned nth = threads ? threads : std::thread::hardware_concurrency();
  if (nth < 1) nth = 1;
  if (nth > count) nth = static_cast<unsigned>(count);
  if (nth <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr err;
  std::mutex err_mu;
  std::vector<std::thread> pool;
  pool.reserve(nth);
  for (unsigned t = 0; t < nth; ++t) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(err_mu);
          if (!err) err = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

}  // namespace detail

// amplitude: solve for A(alpha) and write "alpha,A,bound".
inline int run_amplitude(const RunConfig& cfg) {
  const AmplitudeProfile p = detail::compute_profile(cfg);
  auto out = detail::open_output(cfg.out_dir, "amplitude.csv");
  write_amplitude_csv(out, p);
  if (cfg.format == OutputFormat::json) {
    nlohmann::json j;
    j["config"] = detail::config_echo(cfg);
    j["alpha"] = nlohmann::json::array();
    j["A"] = nlohmann::json::array();
    j["bound"] = nlohmann::json::array();
    for (std::size_t i = 0; i < p.size(); ++i) {
      j["alpha"].push_back(p.h * static_cast<double>(i));
      j["A"].push_back(p.samples[i]);
      j["bound"].push_back(p.bound[i]);
    }
    auto jo = detail::open_output(cfg.out_dir, "amplitude.json");
    jo << j.dump(2) << '\n';
  }
  std::printf("norm_q=%s threshold=%s method=%s h=%s n=%zu\n",
              fmt17(cfg.q.local_l1_norm()).c_str(),
              fmt17(convergence_threshold(cfg.q.local_l1_norm())).c_str(),
              cfg.method == AmplitudeMethod::march ? "march" : "neumann",
              fmt17(cfg.h).c_str(), p.size() - 1);
  return 0;
}

// mfunction: evaluate m(-k^2) over the requested k values.
inline int run_mfunction(const RunConfig& cfg) {
  if (cfg.ks.empty()) {
    throw config_error("mfunction: no k values requested (use --k or --k-range)");
  }
  const double threshold = convergence_threshold(cfg.q.local_l1_norm());
  for (const auto& k : cfg.ks) {
    if (!(k.real() > threshold) && !cfg.allow_unverified) {
      throw domain_violation("mfunction: Re k = " + fmt17(k.real()) +
                             " is not above the convergence threshold " +
                             fmt17(threshold) +
                             " (pass --allow-unverified to proceed)");
    }
  }
  const AmplitudeProfile p = detail::compute_profile(cfg);
  std::vector<MEvaluation> evals(cfg.ks.size());
  detail::parallel_for(cfg.ks.size(), cfg.threads, [&](std::size_t i) {
    evals[i] = m_from_amplitude(p, cfg.q, cfg.ks[i], !cfg.allow_unverified);
  });
  auto out = detail::open_output(cfg.out_dir, "mfunction.csv");
  write_spectral_csv(out, evals);
  if (cfg.format == OutputFormat::json) {
    auto jo = detail::open_output(cfg.out_dir, "mfunction.json");
    jo << spectral_report_json(detail::config_echo(cfg), evals).dump(2) << '\n';
  }
  std::size_t over = 0;
  for (const auto& e : evals) {
    if (!(e.tail_bound <= cfg.tol)) ++over;
  }
  if (over > 0) {
    std::printf("note: tail bound exceeds tol=%s for %zu of %zu k values "
                "(reported per row)\n",
                fmt17(cfg.tol).c_str(), over, evals.size());
  }
  return 0;
}

// response: write r(t) and, given a control table, (Rf)(t).
inline int run_response(const RunConfig& cfg) {
  const AmplitudeProfile p = detail::compute_profile(cfg);
  const ResponseKernel r = response_kernel_from_amplitude(p);
  auto out = detail::open_output(cfg.out_dir, "response.csv");
  write_response_csv(out, r);
  if (!cfg.control_path.empty()) {
    std::ifstream in(cfg.control_path);
    if (!in) throw config_error("cannot open control file " + cfg.control_path);
    const BoundaryControl f = load_control_csv(in);
    if (std::abs(f.h_t - r.h_t) > 1e-12 * std::max(1.0, r.h_t)) {
      throw config_error("control grid step " + fmt17(f.h_t) +
                         " does not match the response grid step " +
                         fmt17(r.h_t));
    }
    const auto rf = apply_response_operator(r, f);
    auto out2 = detail::open_output(cfg.out_dir, "rf.csv");
    write_rf_csv(out2, r.h_t, rf);
    std::printf("control derivative mode: %s\n",
                f.analytic_derivative() ? "analytic" : "numeric");
  }
  return 0;
}

namespace detail {

struct ValidationCheck {
  std::string name;
  bool pass = false;
  double margin = 0.0;  // measured worst value
  double tolerance = 0.0;
  std::string detail;
};

inline std::vector<ValidationCheck> run_validation_suite() {
  std::vector<ValidationCheck> checks;
  using cplx = std::complex<double>;

  auto q_const = Potential::constant(1.0);
  auto q_box = Potential::box(1.0, 1.0);
  auto q_exp = Potential::exp_decay(1.0, 1.0);

  {  // direct ODE oracle against the constant closed form
    ValidationCheck c{"oracle_constant_riccati_vs_closed_form"};
    c.tolerance = 1e-7;
    auto trunc = Potential::constant(1.0, 3.0);
    double worst = 0.0;
    for (double kr : {6.0, 8.0, 10.0, 12.0}) {
      const auto m = m_riccati(trunc, cplx(kr, 0.0), OracleConfig{3.0, 1e-4});
      worst = std::max(worst,
                       std::abs(m - closed_form_m_constant(1.0, cplx(kr, 0.0))));
    }
    c.margin = worst;
    c.pass = worst <= c.tolerance;
    c.detail = "max |m_riccati + sqrt(k^2+1)| over k in {6,8,10,12}";
    checks.push_back(c);
  }
  {  // direct ODE oracle against the box closed form
    ValidationCheck c{"oracle_box_riccati_vs_closed_form"};
    c.tolerance = 1e-7;
    double worst = 0.0;
    for (double kr : {6.0, 8.0, 10.0, 12.0}) {
      const auto m = m_riccati(q_box, cplx(kr, 0.0), OracleConfig{2.0, 1e-4});
      worst = std::max(worst,
                       std::abs(m - closed_form_m_box(1.0, 1.0, cplx(kr, 0.0))));
    }
    c.margin = worst;
    c.pass = worst <= c.tolerance;
    c.detail = "max |m_riccati - matching formula| over k in {6,8,10,12}";
    checks.push_back(c);
  }

  const double h = 1.0 / 400.0;
  const auto prof_const =
      diagonal_amplitude(solve_kernel_march(q_const, 8.0, h), q_const);
  const auto prof_box =
      diagonal_amplitude(solve_kernel_march(q_box, 6.0, h), q_box);
  const auto prof_exp =
      diagonal_amplitude(solve_kernel_march(q_exp, 4.0, h), q_exp);

  {  // full pipeline against the constant closed form
    ValidationCheck c{"pipeline_constant_m_vs_closed_form"};
    c.tolerance = 1e-4;
    double worst = 0.0;
    for (double kr : {6.0, 8.0, 10.0}) {
      const auto ev = m_from_amplitude(prof_const, q_const, cplx(kr, 0.0));
      const auto exact = closed_form_m_constant(1.0, cplx(kr, 0.0));
      worst = std::max(worst, std::abs(ev.m - exact) / std::abs(exact));
    }
    c.margin = worst;
    c.pass = worst <= c.tolerance;
    c.detail = "max relative error over k in {6,8,10}, alpha_max = 8";
    checks.push_back(c);
  }
  {  // full pipeline against the box closed form
    ValidationCheck c{"pipeline_box_m_vs_closed_form"};
    c.tolerance = 1e-3;
    double worst = 0.0;
    for (double kr : {8.0, 10.0, 12.0}) {
      const auto ev = m_from_amplitude(prof_box, q_box, cplx(kr, 0.0));
      const auto exact = closed_form_m_box(1.0, 1.0, cplx(kr, 0.0));
      worst = std::max(worst, std::abs(ev.m - exact) / std::abs(exact));
    }
    c.margin = worst;
    c.pass = worst <= c.tolerance;
    c.detail = "max relative error over k in {8,10,12}, alpha_max = 6";
    checks.push_back(c);
  }
  {  // the amplitude and response integrals are the same object
    ValidationCheck c{"path_identity_amplitude_vs_response"};
    c.tolerance = 1e-10;
    const auto r = response_kernel_from_amplitude(prof_const);
    double worst = 0.0;
    for (double kr : {6.0, 8.0}) {
      const auto ma = m_from_amplitude(prof_const, q_const, cplx(kr, 0.0));
      const auto mr = m_from_response(r, q_const, cplx(kr, 0.0));
      worst = std::max(worst, std::abs(ma.m - mr.m));
    }
    c.margin = worst;
    c.pass = worst <= c.tolerance;
    c.detail = "change of variables t = 2 alpha";
    checks.push_back(c);
  }
  {  // response kernel via the wave-kernel derivative path
    ValidationCheck c{"cross_path_response_kernels"};
    c.tolerance = 1e-3;
    const double hc = 1.0 / 200.0;
    double worst = 0.0;
    for (const auto* q : {&q_const, &q_box, &q_exp}) {
      const auto prof = diagonal_amplitude(solve_kernel_march(*q, 2.0, hc), *q);
      const auto ra = response_kernel_from_amplitude(prof);
      const auto rg = response_from_goursat(solve_V(*q, 2.0, hc), *q);
      for (std::size_t j = 0; j < ra.size(); ++j) {
        worst = std::max(worst, std::abs(ra.samples[j] - rg.samples[2 * j]));
      }
    }
    c.margin = worst;
    c.pass = worst <= c.tolerance;
    c.detail = "sup |r_amplitude - r_goursat| at h = 1/200 over three potentials";
    checks.push_back(c);
  }
  {  // a-priori bounds hold at every grid point
    ValidationCheck c{"amplitude_bounds_satisfied"};
    c.tolerance = 1.0 + kBoundSlack;
    const double hb = 1.0 / 100.0;
    double worst = 0.0;
    bool all = true;
    std::vector<Potential> family = {q_const, q_box, q_exp};
    unsigned long long state = 0x5deece66dULL;
    auto next_unit = [&state]() {
      state = state * 6364136223846793005ULL + 1442695040888963407ULL;
      return static_cast<double>((state >> 17) & 0xffffffffULL) / 4294967295.0;
    };
    for (int rep = 0; rep < 3; ++rep) {
      std::vector<double> vals(12);
      for (auto& v : vals) v = 2.0 * next_unit() - 1.0;
      family.push_back(Potential::sampled(0.25, vals));
    }
    for (const auto& q : family) {
      const auto prof = diagonal_amplitude(solve_kernel_march(q, 3.0, hb), q);
      for (const auto& rep : check_amplitude_bounds(prof, q)) {
        if (!rep.satisfied) all = false;
        if (rep.rhs > 0) worst = std::max(worst, rep.lhs / rep.rhs);
      }
    }
    c.margin = worst;
    c.pass = all;
    c.detail = "max lhs/rhs over built-in and sampled potentials, alpha <= 3";
    checks.push_back(c);
  }
  {  // Herglotz sign diagnostic on complex k
    ValidationCheck c{"herglotz_sign_agreement"};
    c.tolerance = 0.0;
    bool all = true;
    double min_im = 1e300;
    struct Pair { const Potential* q; const AmplitudeProfile* p; };
    for (auto [q, p] : {Pair{&q_const, &prof_const}, Pair{&q_box, &prof_box},
                        Pair{&q_exp, &prof_exp}}) {
      for (int i = 0; i < 10; ++i) {
        const cplx k(6.0 + 6.0 * i / 9.0, -0.1 - 0.9 * i / 9.0);
        const auto ev = m_from_amplitude(*p, *q, k);
        const auto rep = herglotz_check(ev.m, k);
        if (!rep.sign_agrees) all = false;
        min_im = std::min(min_im, rep.im_m);
      }
    }
    c.margin = min_im;
    c.pass = all;
    c.detail = "sign(Im m) = sign(Im z) at 10 complex k for three potentials";
    checks.push_back(c);
  }
  {  // large-k law
    ValidationCheck c{"asymptotic_residual_decay"};
    c.tolerance = 1.0;  // worst residual relative to its per-k tolerance
    const auto m20 = m_from_amplitude(prof_exp, q_exp, cplx(20.0, 0.0));
    const auto m40 = m_from_amplitude(prof_exp, q_exp, cplx(40.0, 0.0));
    const double r20 = asymptotic_residual(1.0, 20.0, m20.m);
    const double r40 = asymptotic_residual(1.0, 40.0, m40.m);
    c.margin = std::max(r20 / 0.1, r40 / 0.05);
    c.pass = r20 <= 0.1 && r40 <= 0.05 && r40 < r20;
    c.detail = "exp_decay(1,1): residual/tol at k=20 (tol 0.1) and k=40 (0.05), decreasing";
    checks.push_back(c);
  }
  return checks;
}

}  // namespace detail

// validate: run the cross-check suite, emit a JSON report, exit 0 iff all
// checks pass.
inline int run_validate(const RunConfig& cfg) {
  const auto checks = detail::run_validation_suite();
  nlohmann::json report;
  report["config"] = detail::config_echo(cfg);
  report["checks"] = nlohmann::json::array();
  bool all = true;
  for (const auto& c : checks) {
    report["checks"].push_back({{"name", c.name},
                                {"pass", c.pass},
                                {"measured", c.margin},
                                {"tolerance", c.tolerance},
                                {"detail", c.detail}});
    all = all && c.pass;
    std::printf("[%s] %-40s measured=%.3e tol=%.3e\n", c.pass ? "PASS" : "FAIL",
                c.name.c_str(), c.margin, c.tolerance);
  }
  report["all_pass"] = all;
  auto out = detail::open_output(cfg.out_dir, "validate.json");
  out << report.dump(2) << '\n';
  std::printf("%s\n", all ? "all checks passed" : "validation FAILED");
  return all ? 0 : 5;
}

}  // namespace weylbc

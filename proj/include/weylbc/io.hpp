#pragma once

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "weylbc/amplitude.hpp"
#include "weylbc/bounds.hpp"
#include "weylbc/errors.hpp"
#include "weylbc/goursat.hpp"
#include "weylbc/potential.hpp"
#include "weylbc/response.hpp"
#include "weylbc/spectral.hpp"

namespace weylbc {

// 17 significant digits: doubles round-trip exactly.
inline std::string fmt17(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

inline double json_number(const nlohmann::json& j, const char* field) {
  if (!j.contains(field)) {
    throw config_error(std::string("potential spec: missing field '") + field + "'");
  }
  if (!j[field].is_number()) {
    throw config_error(std::string("potential spec: field '") + field +
                       "' must be a number");
  }
  const double v = j[field].get<double>();
  if (!std::isfinite(v)) {
    throw config_error(std::string("potential spec: field '") + field +
                       "' is not finite");
  }
  return v;
}

}  // namespace detail

// Structured potential document:
//   {"kind": "constant"|"box"|"exp_decay"|"oscillatory_decay"|"sampled",
//    parameters..., "x_max": number (optional)}
inline Potential parse_potential_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw config_error(std::string("potential spec: invalid JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) {
    throw config_error("potential spec: expected an object with a 'kind' string");
  }
  const std::string kind = j["kind"].get<std::string>();
  double x_max = kUnbounded;
  if (j.contains("x_max")) x_max = detail::json_number(j, "x_max");

  if (kind == "constant") {
    return Potential::constant(detail::json_number(j, "c"), x_max);
  }
  if (kind == "box") {
    return Potential::box(detail::json_number(j, "height"),
                          detail::json_number(j, "width"), x_max);
  }
  if (kind == "exp_decay") {
    return Potential::exp_decay(detail::json_number(j, "amplitude"),
                                detail::json_number(j, "rate"), x_max);
  }
  if (kind == "oscillatory_decay") {
    return Potential::oscillatory_decay(detail::json_number(j, "alpha"),
                                        detail::json_number(j, "beta"), x_max);
  }
  if (kind == "sampled") {
    if (!j.contains("values") || !j["values"].is_array()) {
      throw config_error("potential spec: sampled kind needs a 'values' array");
    }
    std::vector<double> values;
    for (std::size_t i = 0; i < j["values"].size(); ++i) {
      const auto& v = j["values"][i];
      if (!v.is_number() || !std::isfinite(v.get<double>())) {
        throw config_error("potential spec: values[" + std::to_string(i) +
                           "] is not a finite number");
      }
      values.push_back(v.get<double>());
    }
    return Potential::sampled(detail::json_number(j, "h_q"), std::move(values));
  }
  throw config_error("potential spec: unknown kind '" + kind + "'");
}

// Two-column sample table: header "x,q", uniform x grid starting at 0.
inline Potential parse_potential_table(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw config_error("sample table: empty input");
  if (detail::trim(line) != "x,q") {
    throw config_error("sample table line 1: expected header \"x,q\"");
  }
  std::vector<double> xs, qs;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = detail::trim(line);
    if (t.empty()) continue;
    const auto comma = t.find(',');
    if (comma == std::string::npos) {
      throw config_error("sample table line " + std::to_string(lineno) +
                         ": expected two comma-separated columns");
    }
    try {
      std::size_t used = 0;
      const double x = std::stod(t.substr(0, comma), &used);
      const double qv = std::stod(t.substr(comma + 1), &used);
      if (!std::isfinite(x) || !std::isfinite(qv)) throw std::invalid_argument("");
      xs.push_back(x);
      qs.push_back(qv);
    } catch (const std::exception&) {
      throw config_error("sample table line " + std::to_string(lineno) +
                         ": non-finite or malformed value");
    }
  }
  if (xs.size() < 2) throw config_error("sample table: need at least 2 rows");
  if (std::abs(xs[0]) > 1e-12) {
    throw config_error("sample table line 2: grid must start at x = 0");
  }
  const double step = xs[1] - xs[0];
  if (!(step > 0)) throw config_error("sample table line 3: x must be increasing");
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double expect = step * static_cast<double>(i);
    if (std::abs(xs[i] - expect) > 1e-9 * std::max(1.0, std::abs(expect))) {
      throw config_error("sample table line " + std::to_string(i + 2) +
                         ": non-uniform grid step");
    }
  }
  return Potential::sampled(step, std::move(qs));
}

// Accepts inline JSON (first non-space char '{'), a .csv sample table path,
// or a JSON document path.
inline Potential load_potential(const std::string& source) {
  const std::string t = detail::trim(source);
  if (!t.empty() && t.front() == '{') return parse_potential_json(t);
  std::ifstream in(t);
  if (!in) throw config_error("potential: cannot open '" + t + "'");
  if (t.size() >= 4 && t.substr(t.size() - 4) == ".csv") {
    return parse_potential_table(in);
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_potential_json(buf.str());
}

inline Potential parse_potential(const std::string& text) {
  const std::string t = detail::trim(text);
  if (!t.empty() && t.front() == '{') return parse_potential_json(t);
  std::istringstream in(t);
  return parse_potential_table(in);
}

// --- writers (deterministic: no timestamps, fixed formatting) ---

inline void write_amplitude_csv(std::ostream& out, const AmplitudeProfile& p) {
  out << "alpha,A,bound\n";
  for (std::size_t j = 0; j < p.size(); ++j) {
    out << fmt17(p.h * static_cast<double>(j)) << ',' << fmt17(p.samples[j])
        << ',' << fmt17(p.bound[j]) << '\n';
  }
}

inline void write_bound_reports_csv(std::ostream& out,
                                    const std::vector<BoundReport>& reports) {
  out << "alpha,lhs,rhs,ok\n";
  for (const auto& r : reports) {
    out << fmt17(r.alpha) << ',' << fmt17(r.lhs) << ',' << fmt17(r.rhs) << ','
        << (r.satisfied ? 1 : 0) << '\n';
  }
}

inline void write_response_csv(std::ostream& out, const ResponseKernel& r) {
  out << "t,r\n";
  for (std::size_t j = 0; j < r.size(); ++j) {
    out << fmt17(r.h_t * static_cast<double>(j)) << ',' << fmt17(r.samples[j])
        << '\n';
  }
}

inline void write_rf_csv(std::ostream& out, double h_t,
                         const std::vector<double>& rf) {
  out << "t,Rf\n";
  for (std::size_t j = 0; j < rf.size(); ++j) {
    out << fmt17(h_t * static_cast<double>(j)) << ',' << fmt17(rf[j]) << '\n';
  }
}

inline void write_wave_csv(std::ostream& out, const WaveKernel& w) {
  out << "x,s,w\n";
  for (std::size_t j = 0; j <= w.n; ++j) {
    const std::size_t imax = std::min(j, w.n - j);
    for (std::size_t i = 0; i <= imax; ++i) {
      out << fmt17(w.h * static_cast<double>(i)) << ','
          << fmt17(w.h * static_cast<double>(j)) << ',' << fmt17(w.at(i, j))
          << '\n';
    }
  }
}

inline void write_spectral_csv(std::ostream& out,
                               const std::vector<MEvaluation>& evals) {
  out << "re_k,im_k,re_m,im_m,tail_bound,quad_est\n";
  for (const auto& e : evals) {
    out << fmt17(e.k.real()) << ',' << fmt17(e.k.imag()) << ','
        << fmt17(e.m.real()) << ',' << fmt17(e.m.imag()) << ','
        << fmt17(e.tail_bound) << ',' << fmt17(e.quadrature_estimate) << '\n';
  }
}

inline nlohmann::json spectral_report_json(const nlohmann::json& config_echo,
                                           const std::vector<MEvaluation>& evals) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& e : evals) {
    rows.push_back({{"re_k", e.k.real()},
                    {"im_k", e.k.imag()},
                    {"re_m", e.m.real()},
                    {"im_m", e.m.imag()},
                    {"tail_bound", e.tail_bound},
                    {"quad_est", e.quadrature_estimate}});
  }
  return nlohmann::json{{"config", config_echo}, {"rows", rows}};
}

// Control table "t,f" on a uniform grid starting at 0 with f(0) = 0.
inline BoundaryControl load_control_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw config_error("control table: empty input");
  if (detail::trim(line) != "t,f") {
    throw config_error("control table line 1: expected header \"t,f\"");
  }
  std::vector<double> ts, fs;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = detail::trim(line);
    if (t.empty()) continue;
    const auto comma = t.find(',');
    if (comma == std::string::npos) {
      throw config_error("control table line " + std::to_string(lineno) +
                         ": expected two comma-separated columns");
    }
    try {
      const double tv = std::stod(t.substr(0, comma));
      const double fv = std::stod(t.substr(comma + 1));
      if (!std::isfinite(tv) || !std::isfinite(fv)) throw std::invalid_argument("");
      ts.push_back(tv);
      fs.push_back(fv);
    } catch (const std::exception&) {
      throw config_error("control table line " + std::to_string(lineno) +
                         ": non-finite or malformed value");
    }
  }
  if (ts.size() < 3) throw config_error("control table: need at least 3 rows");
  if (std::abs(ts[0]) > 1e-12) {
    throw config_error("control table: grid must start at t = 0");
  }
  const double h = ts[1] - ts[0];
  if (!(h > 0)) throw config_error("control table: t must be increasing");
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const double expect = h * static_cast<double>(i);
    if (std::abs(ts[i] - expect) > 1e-9 * std::max(1.0, std::abs(expect))) {
      throw config_error("control table line " + std::to_string(i + 2) +
                         ": non-uniform grid step");
    }
  }
  return BoundaryControl::from_samples(h, std::move(fs));
}

}  // namespace weylbc

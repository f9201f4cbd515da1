// weylbc: Titchmarsh-Weyl m-functions by the boundary-control route.
//
// Subcommands:
//   amplitude   solve the kernel equation, write "alpha,A,bound"
//   mfunction   evaluate m(-k^2) over a k list/range, write the spectral table
//   response    write the response kernel r(t) and optionally (Rf)(t)
//   validate    run the cross-check suite, write validate.json
//
// Exit codes: 0 ok, 2 config error, 3 solver failure, 4 domain violation,
// 5 validation failure.

#include <cctype>
#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "weylbc/cli.hpp"

namespace {

std::complex<double> parse_complex_token(const std::string& token) {
  std::string s;
  for (char c : token) {
    if (!std::isspace(static_cast<unsigned char>(c))) s += c;
  }
  if (s.empty()) throw weylbc::config_error("empty k token");
  if (s.find('i') == std::string::npos) {
    return {std::stod(s), 0.0};
  }
  if (s.back() != 'i') {
    throw weylbc::config_error("bad complex k token '" + token + "'");
  }
  s.pop_back();
  // split [re][+/-im]; a sign at position 0 or after e/E belongs to a number
  std::size_t split = std::string::npos;
  for (std::size_t p = 1; p < s.size(); ++p) {
    if ((s[p] == '+' || s[p] == '-') && s[p - 1] != 'e' && s[p - 1] != 'E') {
      split = p;
    }
  }
  try {
    if (split == std::string::npos) {
      if (s.empty() || s == "+" || s == "-") {
        return {0.0, s == "-" ? -1.0 : 1.0};
      }
      return {0.0, std::stod(s)};
    }
    const double re = std::stod(s.substr(0, split));
    std::string imtxt = s.substr(split);
    if (imtxt == "+") imtxt = "1";
    if (imtxt == "-") imtxt = "-1";
    return {re, std::stod(imtxt)};
  } catch (const std::exception&) {
    throw weylbc::config_error("bad complex k token '" + token + "'");
  }
}

std::vector<std::complex<double>> parse_k_list(const std::string& text) {
  std::vector<std::complex<double>> ks;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto comma = text.find(',', pos);
    const std::string tok =
        text.substr(pos, comma == std::string::npos ? comma : comma - pos);
    if (!tok.empty()) ks.push_back(parse_complex_token(tok));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (ks.empty()) throw weylbc::config_error("--k: no values parsed");
  return ks;
}

std::vector<std::complex<double>> parse_k_range(const std::string& text) {
  const auto c1 = text.find(':');
  const auto c2 = text.find(':', c1 == std::string::npos ? c1 : c1 + 1);
  if (c1 == std::string::npos || c2 == std::string::npos) {
    throw weylbc::config_error("--k-range: expected start:stop:count");
  }
  double start = 0, stop = 0;
  long count = 0;
  try {
    start = std::stod(text.substr(0, c1));
    stop = std::stod(text.substr(c1 + 1, c2 - c1 - 1));
    count = std::stol(text.substr(c2 + 1));
  } catch (const std::exception&) {
    throw weylbc::config_error("--k-range: malformed start:stop:count");
  }
  if (!(start > 0) || !(stop > 0) || count < 1) {
    throw weylbc::config_error("--k-range: needs start, stop > 0 and count >= 1");
  }
  std::vector<std::complex<double>> ks;
  for (long i = 0; i < count; ++i) {
    const double f = count == 1 ? 0.0
                                : static_cast<double>(i) /
                                      static_cast<double>(count - 1);
    ks.emplace_back(start * std::pow(stop / start, f), 0.0);
  }
  return ks;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Titchmarsh-Weyl m-function by the boundary-control route"};
  app.require_subcommand(1);

  std::string potential_spec;
  std::string k_list, k_range, control_path, out_dir = ".", format = "csv",
              method = "march";
  double xmax = 4.0, step = 1.0 / 400.0, tol = 1e-6;
  bool allow_unverified = false;

  auto add_common = [&](CLI::App* cmd, bool needs_potential) {
    auto* p = cmd->add_option("--potential", potential_spec,
                              "potential spec: JSON file, inline JSON, or CSV "
                              "sample table");
    if (needs_potential) p->required();
    cmd->add_option("--xmax", xmax, "grid extent X of the kernel solve");
    cmd->add_option("--step", step, "grid step h (X/h must be an integer)");
    cmd->add_option("--tol", tol, "tail / series tolerance");
    cmd->add_option("--method", method, "march|neumann")
        ->check(CLI::IsMember({"march", "neumann"}));
    cmd->add_option("--out", out_dir, "output directory");
    cmd->add_option("--format", format, "csv|json")
        ->check(CLI::IsMember({"csv", "json"}));
    cmd->add_flag("--allow-unverified", allow_unverified,
                  "evaluate k below the convergence threshold");
  };

  auto* cmd_amp = app.add_subcommand("amplitude", "solve for A(alpha)");
  add_common(cmd_amp, true);

  auto* cmd_m = app.add_subcommand("mfunction", "evaluate m(-k^2)");
  add_common(cmd_m, true);
  cmd_m->add_option("--k", k_list, "comma-separated k values (a or a+bi)");
  cmd_m->add_option("--k-range", k_range,
                    "geometric range start:stop:count of real k");

  auto* cmd_r = app.add_subcommand("response", "response kernel and operator");
  add_common(cmd_r, true);
  cmd_r->add_option("--control", control_path, "control table CSV \"t,f\"");

  auto* cmd_v = app.add_subcommand("validate", "run the cross-check suite");
  add_common(cmd_v, false);

  CLI11_PARSE(app, argc, argv);

  try {
    weylbc::RunConfig cfg;
    cfg.x_extent = xmax;
    cfg.h = step;
    cfg.tol = tol;
    cfg.method = method == "neumann" ? weylbc::AmplitudeMethod::neumann
                                     : weylbc::AmplitudeMethod::march;
    cfg.out_dir = out_dir;
    cfg.format =
        format == "json" ? weylbc::OutputFormat::json : weylbc::OutputFormat::csv;
    cfg.allow_unverified = allow_unverified;
    cfg.control_path = control_path;
    if (!potential_spec.empty()) {
      cfg.q = weylbc::load_potential(potential_spec);
      cfg.potential_source = potential_spec;
    }
    if (const char* env = std::getenv("WEYLBC_THREADS")) {
      const long v = std::strtol(env, nullptr, 10);
      if (v > 0) cfg.threads = static_cast<unsigned>(v);
    }
    if (!k_list.empty()) cfg.ks = parse_k_list(k_list);
    if (!k_range.empty()) {
      auto more = parse_k_range(k_range);
      cfg.ks.insert(cfg.ks.end(), more.begin(), more.end());
    }

    if (cmd_amp->parsed()) return weylbc::run_amplitude(cfg);
    if (cmd_m->parsed()) return weylbc::run_mfunction(cfg);
    if (cmd_r->parsed()) return weylbc::run_response(cfg);
    if (cmd_v->parsed()) return weylbc::run_validate(cfg);
    return 2;
  } catch (const weylbc::config_error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const weylbc::solver_error& e) {
    std::cerr << "solver error: " << e.what() << '\n';
    return 3;
  } catch (const weylbc::domain_violation& e) {
    std::cerr << "domain violation: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}

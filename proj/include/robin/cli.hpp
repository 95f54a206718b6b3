#pragma once

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "robin/closed_form.hpp"
#include "robin/experiments.hpp"
#include "robin/io.hpp"
#include "robin/problems.hpp"
#include "robin/trace.hpp"

namespace robin::cli {

enum ExitCode : int { kOk = 0, kValidation = 2, kNoConvergence = 3, kSelftestFailed = 4 };

/// Everything one invocation needs. Mirrors the JSON accepted by --config.
struct RunConfig {
  std::string command;
  std::optional<Domain> domain;
  std::optional<double> p;
  std::optional<double> alpha;
  std::vector<double> alphas;
  std::vector<double> mus;
  std::optional<double> rho, r;
  std::optional<int> nu;
  double tol = 1e-9;
  SolverConfig solver;
  std::string output;
  std::string profile;  // optional t,u CSV for `solve` and `concentration`
  std::uint64_t seed = 20240917;
  int jobs = 1;
};

inline const std::vector<std::string>& commands() {
  static const std::vector<std::string> names{"solve",   "sweep", "trace",         "trace-slope",
                                              "compare", "rates", "concentration", "selftest"};
  return names;
}

inline void apply_solver_json(const nlohmann::json& j, SolverConfig& s) {
  io::require_keys(j,
                   {"max_iterations", "quotient_tol", "residual_tol", "initial_step", "shrink",
                    "sufficient_decrease", "cells", "layer_fraction", "layer_width", "truncation",
                    "far", "richardson"},
                   "solver");
  if (j.contains("max_iterations")) s.max_iterations = io::get_int(j, "max_iterations", "solver");
  if (j.contains("quotient_tol")) s.quotient_tol = io::get_number(j, "quotient_tol", "solver");
  if (j.contains("residual_tol")) s.residual_tol = io::get_number(j, "residual_tol", "solver");
  if (j.contains("initial_step")) s.initial_step = io::get_number(j, "initial_step", "solver");
  if (j.contains("shrink")) s.shrink = io::get_number(j, "shrink", "solver");
  if (j.contains("sufficient_decrease"))
    s.sufficient_decrease = io::get_number(j, "sufficient_decrease", "solver");
  if (j.contains("cells")) {
    const int c = io::get_int(j, "cells", "solver");
    if (c < 8) throw std::invalid_argument("solver: cells must be >= 8");
    s.cells = static_cast<std::size_t>(c);
  }
  if (j.contains("layer_fraction")) s.layer_fraction = io::get_number(j, "layer_fraction", "solver");
  if (j.contains("layer_width")) s.layer_width = io::get_number(j, "layer_width", "solver");
  if (j.contains("truncation")) s.truncation = io::get_number(j, "truncation", "solver");
  if (j.contains("far")) {
    const auto far = j.at("far").get<std::string>();
    if (far == "neumann") s.far = FarEndpoint::NeumannFree;
    else if (far == "dirichlet") s.far = FarEndpoint::DirichletCap;
    else throw std::invalid_argument("solver: far must be 'neumann' or 'dirichlet'");
  }
  if (j.contains("richardson")) {
    if (!j.at("richardson").is_boolean()) throw std::invalid_argument("solver: richardson must be boolean");
    s.richardson = j.at("richardson").get<bool>();
  }
}

inline std::vector<double> number_list(const nlohmann::json& j, const char* key) {
  if (!j.at(key).is_array()) throw std::invalid_argument(std::string(key) + " must be an array");
  std::vector<double> v;
  for (const auto& x : j.at(key)) {
    if (!x.is_number()) throw std::invalid_argument(std::string(key) + " must hold numbers");
    v.push_back(x.get<double>());
  }
  return v;
}

inline void apply_config_json(const nlohmann::json& j, RunConfig& rc) {
  io::require_keys(j,
                   {"command", "domain", "p", "alpha", "alphas", "mus", "rho", "r", "nu", "tol",
                    "solver", "output", "profile", "seed", "jobs"},
                   "config");
  if (j.contains("command")) rc.command = j.at("command").get<std::string>();
  if (j.contains("domain")) rc.domain = io::domain_from_json(j.at("domain"));
  if (j.contains("p")) rc.p = io::get_number(j, "p", "config");
  if (j.contains("alpha")) rc.alpha = io::get_number(j, "alpha", "config");
  if (j.contains("alphas")) rc.alphas = number_list(j, "alphas");
  if (j.contains("mus")) rc.mus = number_list(j, "mus");
  if (j.contains("rho")) rc.rho = io::get_number(j, "rho", "config");
  if (j.contains("r")) rc.r = io::get_number(j, "r", "config");
  if (j.contains("nu")) rc.nu = io::get_int(j, "nu", "config");
  if (j.contains("tol")) rc.tol = io::get_number(j, "tol", "config");
  if (j.contains("solver")) apply_solver_json(j.at("solver"), rc.solver);
  if (j.contains("output")) rc.output = j.at("output").get<std::string>();
  if (j.contains("profile")) rc.profile = j.at("profile").get<std::string>();
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned()) throw std::invalid_argument("config: seed must be a nonnegative integer");
    rc.seed = j.at("seed").get<std::uint64_t>();
  }
  if (j.contains("jobs")) rc.jobs = io::get_int(j, "jobs", "config");
}

inline std::vector<double> parse_list(const std::string& text) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double x = 0.0;
    try {
      x = std::stod(item, &used);
    } catch (const std::exception&) {
      throw std::invalid_argument("cannot parse number '" + item + "'");
    }
    if (used != item.size()) throw std::invalid_argument("cannot parse number '" + item + "'");
    v.push_back(x);
  }
  if (v.empty()) throw std::invalid_argument("empty number list");
  return v;
}

template <class T>
const T& need(const std::optional<T>& v, const char* name) {
  if (!v) throw std::invalid_argument(std::string("missing required parameter --") + name);
  return *v;
}

/// Runs the closed-form oracle checks and the inequality property test;
/// returns the number of failed checks.
inline int run_selftest(std::uint64_t seed, std::ostream& out) {
  int failures = 0;
  auto check = [&](const std::string& name, bool ok) {
    out << (ok ? "PASS " : "FAIL ") << name << '\n';
    if (!ok) ++failures;
  };
  auto close = [](double a, double b, double rel) {
    return std::abs(a - b) <= rel * std::max(1.0, std::abs(b));
  };
  check("half_line_eigenvalue p=2 alpha=1", close(half_line_eigenvalue(2, 1).value, -1.0, 1e-14));
  check("half_line_eigenvalue p=3 alpha=4", close(half_line_eigenvalue(3, 4).value, -16.0, 1e-14));
  check("half_line_eigenvalue alpha=0", half_line_eigenvalue(2.5, 0).value == 0.0);
  check("half_line_minimizer p=2 alpha=2 t=1",
        close(half_line_minimizer(2, 2, 1).value, std::exp(-2.0), 1e-14));
  check("half_line_minimizer p=3 alpha=4 t=0.5",
        close(half_line_minimizer(3, 4, 0.5).value, std::exp(-1.0), 1e-14));
  check("sector_eigenvalue theta=pi/4", close(sector_eigenvalue(kPi / 4, 2, 1).value, -2.0, 1e-12));
  check("sector_eigenvalue theta=2pi/3", close(sector_eigenvalue(2 * kPi / 3, 2, 1).value, -1.0, 1e-14));
  check("aux_inequality_constant p=2", close(aux_inequality_constant(2).value, 2.0, 1e-14));
  check("aux_inequality_constant p=1.5",
        close(aux_inequality_constant(1.5).value, std::pow(0.75, -0.5), 1e-14));
  check("leading_asymptote p=2 alpha=10 disk",
        close(leading_asymptote(2, 10, 1.0, 2).value, -110.0, 1e-14));
  check("leading_asymptote p=3 alpha=8 nu=3",
        close(leading_asymptote(3, 8, 0.5, 3).value, -2.0 * std::pow(8.0, 1.5) - 8.0, 1e-14));
  check("half-space trace constant p=2", close(half_space_trace_constant(2), 1.0, 1e-14));
  check("half-space trace constant p=3",
        close(half_space_trace_constant(3), std::pow(2.0, -2.0 / 3.0), 1e-14));
  check("extension bound equal constants p=2", close(extension_lower_bound(1, 1, 2), std::sqrt(2.0), 1e-14));
  std::uint64_t s = seed;
  for (double p : {1.2, 1.5, 2.0, 3.0, 5.0}) {
    const auto r = check_aux_inequality(p, 100000, s++);
    check("aux inequality p=" + io::fmt12(p) + " (" + std::to_string(r.samples) + " samples, " +
              std::to_string(r.violations) + " violations)",
          r.violations == 0);
  }
  return failures;
}

class OutputSink {
 public:
  OutputSink(const std::string& path, std::ostream& fallback) : out_(&fallback) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw std::invalid_argument("cannot open output file '" + path + "'");
      out_ = &file_;
    }
  }
  std::ostream& stream() { return *out_; }

 private:
  std::ofstream file_;
  std::ostream* out_;
};

inline void write_profile(const RunConfig& rc, const EigenSolution& sol) {
  if (rc.profile.empty()) return;
  std::ofstream f(rc.profile);
  if (!f) throw std::invalid_argument("cannot open profile file '" + rc.profile + "'");
  io::write_profile_csv(f, sol);
}

inline int dispatch(const RunConfig& rc, std::ostream& out, std::ostream& err) {
  using nlohmann::json;
  OutputSink sink(rc.output, out);
  std::ostream& os = sink.stream();
  const auto& cmd = rc.command;

  if (cmd == "selftest") {
    const int failures = run_selftest(rc.seed, os);
    if (failures) err << failures << " selftest check(s) failed\n";
    return failures ? kSelftestFailed : kOk;
  }
  if (cmd == "compare") {
    const double rho = need(rc.rho, "rho"), r = need(rc.r, "r");
    const auto c = isoperimetric_compare(rho, r, need(rc.p, "p"), need(rc.alpha, "alpha"),
                                         need(rc.nu, "nu"), rc.solver);
    os << io::to_json(c).dump(2) << '\n';
    return c.converged ? kOk : kNoConvergence;
  }

  const Domain& domain = need(rc.domain, "domain");
  const double p = need(rc.p, "p");
  if (cmd == "solve") {
    const double alpha = need(rc.alpha, "alpha");
    json j;
    if (const auto* s = std::get_if<Sector>(&domain)) {
      const auto v = sector_eigenvalue(s->theta, p, alpha);
      j = {{"eigenvalue", io::num(v.value)}, {"method", v.formula}, {"converged", true}};
    } else {
      const auto sol = solve_domain(domain, p, alpha, rc.solver);
      j = io::to_json(sol);
      write_profile(rc, sol);
      if (!sol.converged) {
        os << j.dump(2) << '\n';
        err << "solver did not converge\n";
        return kNoConvergence;
      }
    }
    os << j.dump(2) << '\n';
    return kOk;
  }
  if (cmd == "sweep" || cmd == "rates") {
    if (rc.alphas.empty()) throw std::invalid_argument("missing required parameter --alphas");
    const auto sweep = alpha_sweep(domain, p, rc.alphas, rc.solver, rc.jobs);
    if (cmd == "sweep") {
      io::write_sweep_csv(os, sweep);
    } else {
      const auto curv = curvature_data(domain);
      const auto fit = fit_remainder_rate(sweep, curv.h_max, curv.nu);
      os << io::to_json(fit).dump(2) << '\n';
    }
    if (sweep.partial) {
      err << "some sweep rows did not converge\n";
      return kNoConvergence;
    }
    return kOk;
  }
  if (cmd == "trace") {
    const auto r = trace_constant(domain, p, rc.tol, rc.solver);
    os << io::to_json(r).dump(2) << '\n';
    return r.converged ? kOk : kNoConvergence;
  }
  if (cmd == "trace-slope") {
    if (rc.mus.empty()) throw std::invalid_argument("missing required parameter --mus");
    const auto fit = trace_expansion_slope(domain, p, rc.mus, rc.tol, rc.solver);
    io::write_trace_csv(os, fit);
    err << io::to_json(fit).dump() << '\n';
    return kOk;
  }
  if (cmd == "concentration") {
    const double alpha = need(rc.alpha, "alpha");
    const auto sol = solve_domain(domain, p, alpha, rc.solver);
    write_profile(rc, sol);
    auto j = io::to_json(concentration_report(sol, domain, p, alpha));
    j["converged"] = sol.converged;
    os << j.dump(2) << '\n';
    return sol.converged ? kOk : kNoConvergence;
  }
  throw std::invalid_argument("unknown command '" + cmd + "'");
}

/// Command-line entry point. Exit codes: 0 success, 2 invalid input,
/// 3 solver failure, 4 selftest failure.
inline int run(const std::vector<std::string>& args, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
  CLI::App app{"Robin p-Laplacian eigenvalue laboratory", "robin_lab"};
  app.fallthrough();
  std::string domain_text, alphas_text, mus_text, config_path, far;
  std::optional<double> p, alpha, rho, r, tol, layer_width, truncation, quotient_tol, residual_tol;
  std::optional<int> nu, cells, max_iter, jobs;
  std::optional<std::uint64_t> seed;
  std::string output, profile;
  bool no_richardson = false;

  app.add_option("--config", config_path, "JSON file with the same keys as the flags");
  app.add_option("--domain", domain_text, "domain JSON or a bare kind such as halfline");
  app.add_option("--p", p, "exponent p");
  app.add_option("--alpha", alpha, "Robin parameter");
  app.add_option("--alphas", alphas_text, "comma-separated increasing Robin parameters");
  app.add_option("--mus", mus_text, "comma-separated increasing dilation factors");
  app.add_option("--rho", rho, "ball radius (compare)");
  app.add_option("--r", r, "shell inner radius (compare)");
  app.add_option("--nu", nu, "dimension (compare)");
  app.add_option("--tol", tol, "tolerance on |Lambda(S) + 1| (trace)");
  app.add_option("--cells", cells, "grid cells");
  app.add_option("--max-iter", max_iter, "maximum solver iterations");
  app.add_option("--quotient-tol", quotient_tol, "relative quotient stagnation tolerance");
  app.add_option("--residual-tol", residual_tol, "Euler-Lagrange residual tolerance relative to |lambda|");
  app.add_option("--layer-width", layer_width, "boundary layer width in units of 1/beta");
  app.add_option("--truncation", truncation, "half-line truncation in units of 1/beta");
  app.add_option("--far", far, "far endpoint condition: neumann or dirichlet");
  app.add_flag("--no-richardson", no_richardson, "report the raw discrete eigenvalue");
  app.add_option("--output", output, "write the result here instead of standard output");
  app.add_option("--profile", profile, "write the eigenfunction as t,u CSV");
  app.add_option("--seed", seed, "random seed");
  app.add_option("--jobs", jobs, "parallel sweep rows (disables warm starts)");
  std::vector<CLI::App*> subs;
  for (const auto& name : commands()) subs.push_back(app.add_subcommand(name));
  app.require_subcommand(0, 1);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kValidation;
  }

  RunConfig rc;
  try {
    if (!config_path.empty()) {
      std::ifstream f(config_path);
      if (!f) throw std::invalid_argument("cannot open config file '" + config_path + "'");
      apply_config_json(nlohmann::json::parse(f), rc);
    }
    for (auto* s : subs)
      if (s->parsed()) rc.command = s->get_name();
    if (rc.command.empty()) throw std::invalid_argument("no command given");
    if (!domain_text.empty()) rc.domain = io::parse_domain(domain_text);
    if (p) rc.p = p;
    if (alpha) rc.alpha = alpha;
    if (!alphas_text.empty()) rc.alphas = parse_list(alphas_text);
    if (!mus_text.empty()) rc.mus = parse_list(mus_text);
    if (rho) rc.rho = rho;
    if (r) rc.r = r;
    if (nu) rc.nu = nu;
    if (tol) rc.tol = *tol;
    if (cells) {
      if (*cells < 8) throw std::invalid_argument("--cells must be >= 8");
      rc.solver.cells = static_cast<std::size_t>(*cells);
    }
    if (max_iter) rc.solver.max_iterations = *max_iter;
    if (quotient_tol) rc.solver.quotient_tol = *quotient_tol;
    if (residual_tol) rc.solver.residual_tol = *residual_tol;
    if (layer_width) rc.solver.layer_width = *layer_width;
    if (truncation) rc.solver.truncation = *truncation;
    if (!far.empty()) apply_solver_json(nlohmann::json{{"far", far}}, rc.solver);
    if (no_richardson) rc.solver.richardson = false;
    if (!output.empty()) rc.output = output;
    if (!profile.empty()) rc.profile = profile;
    if (seed) rc.seed = *seed;
    if (jobs) rc.jobs = *jobs;
    if (rc.jobs < 1) throw std::invalid_argument("--jobs must be >= 1");
    if (!(rc.tol > 0.0)) throw std::invalid_argument("--tol must be positive");
    rc.solver.validate();
    return dispatch(rc, out, err);
  } catch (const ConvergenceError& e) {
    err << "error: " << e.what() << '\n';
    return kNoConvergence;
  } catch (const BracketError& e) {
    err << "error: " << e.what() << " (Lambda at bracket ends: " << e.lambda_lo() << ", "
        << e.lambda_hi() << ")\n";
    return kNoConvergence;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const std::out_of_range& e) {
    err << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const std::runtime_error& e) {
    err << "error: " << e.what() << '\n';
    return kNoConvergence;
  }
}

}  // namespace robin::cli

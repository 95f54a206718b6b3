#pragma once

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <initializer_list>
#include <ostream>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>

#include "robin/experiments.hpp"
#include "robin/geometry.hpp"
#include "robin/solver.hpp"
#include "robin/trace.hpp"

namespace robin::io {

using nlohmann::json;

/// Rounds to 12 significant digits so that JSON numbers print with at most
/// that many digits.
inline double sig12(double x) {
  if (!std::isfinite(x) || x == 0.0) return x;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return std::stod(buf);
}

inline std::string fmt12(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

/// Number that serializes with 12 significant digits; non-finite values
/// become null.
inline json num(double x) { return std::isfinite(x) ? json(sig12(x)) : json(nullptr); }

inline void require_keys(const json& j, std::initializer_list<const char*> allowed,
                         const std::string& where) {
  if (!j.is_object()) throw std::invalid_argument(where + ": expected a JSON object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : j.items())
    if (!ok.count(key)) throw std::invalid_argument(where + ": unknown key '" + key + "'");
}

inline double get_number(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key) || !j.at(key).is_number())
    throw std::invalid_argument(where + ": missing numeric field '" + key + "'");
  return j.at(key).get<double>();
}

inline int get_int(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key) || !j.at(key).is_number_integer())
    throw std::invalid_argument(where + ": missing integer field '" + key + "'");
  return j.at(key).get<int>();
}

// Domain schema:
//   {"kind": "halfline"}
//   {"kind": "interval", "delta": d}
//   {"kind": "ball", "rho": rho, "nu": nu}
//   {"kind": "shell", "r": r, "R": R, "nu": nu}
//   {"kind": "sector", "theta": theta}
//   {"kind": "model_layer", "kappa": [k1, ...], "delta": d}
inline json to_json(const Domain& domain) {
  struct Visitor {
    json operator()(const HalfLine&) const { return {{"kind", "halfline"}}; }
    json operator()(const Interval& d) const {
      return {{"kind", "interval"}, {"delta", num(d.length)}};
    }
    json operator()(const Ball& d) const {
      return {{"kind", "ball"}, {"rho", num(d.rho)}, {"nu", d.nu}};
    }
    json operator()(const Shell& d) const {
      return {{"kind", "shell"}, {"r", num(d.inner)}, {"R", num(d.outer)}, {"nu", d.nu}};
    }
    json operator()(const Sector& d) const {
      return {{"kind", "sector"}, {"theta", num(d.theta)}};
    }
    json operator()(const ModelLayer& d) const {
      json k = json::array();
      for (double x : d.curvatures) k.push_back(num(x));
      return {{"kind", "model_layer"}, {"kappa", k}, {"delta", num(d.depth)}};
    }
  };
  return std::visit(Visitor{}, domain);
}

inline Domain domain_from_json(const json& j) {
  if (j.is_string()) return domain_from_json(json{{"kind", j.get<std::string>()}});
  if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string())
    throw std::invalid_argument("domain: expected an object with a string 'kind'");
  const std::string kind = j.at("kind").get<std::string>();
  Domain d;
  if (kind == "halfline") {
    require_keys(j, {"kind"}, "halfline");
    d = HalfLine{};
  } else if (kind == "interval") {
    require_keys(j, {"kind", "delta"}, "interval");
    d = Interval{get_number(j, "delta", "interval")};
  } else if (kind == "ball") {
    require_keys(j, {"kind", "rho", "nu"}, "ball");
    d = Ball{get_number(j, "rho", "ball"), get_int(j, "nu", "ball")};
  } else if (kind == "shell") {
    require_keys(j, {"kind", "r", "R", "nu"}, "shell");
    d = Shell{get_number(j, "r", "shell"), get_number(j, "R", "shell"), get_int(j, "nu", "shell")};
  } else if (kind == "sector") {
    require_keys(j, {"kind", "theta"}, "sector");
    d = Sector{get_number(j, "theta", "sector")};
  } else if (kind == "model_layer") {
    require_keys(j, {"kind", "kappa", "delta"}, "model_layer");
    if (!j.contains("kappa") || !j.at("kappa").is_array())
      throw std::invalid_argument("model_layer: 'kappa' must be an array");
    std::vector<double> k;
    for (const auto& x : j.at("kappa")) {
      if (!x.is_number()) throw std::invalid_argument("model_layer: curvatures must be numbers");
      k.push_back(x.get<double>());
    }
    d = ModelLayer{std::move(k), get_number(j, "delta", "model_layer")};
  } else {
    throw std::invalid_argument("domain: unknown kind '" + kind + "'");
  }
  validate(d);
  return d;
}

/// Accepts either a JSON document or a bare kind name such as "halfline".
inline Domain parse_domain(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error&) {
    j = json(text);
  }
  return domain_from_json(j);
}

inline json to_json(const EigenSolution& s) {
  json j{{"eigenvalue", num(s.estimate())},
         {"discrete_eigenvalue", num(s.eigenvalue)},
         {"residual", num(s.residual)},
         {"iterations", s.iterations},
         {"converged", s.converged}};
  if (s.extrapolated) j["extrapolated"] = true;
  return j;
}

inline void write_profile_csv(std::ostream& os, const EigenSolution& s) {
  os << "t,u\n";
  for (std::size_t i = 0; i < s.t.size(); ++i) os << fmt12(s.t[i]) << ',' << fmt12(s.u[i]) << '\n';
}

inline void write_sweep_csv(std::ostream& os, const SweepResult& sweep) {
  os << "alpha,lambda,residual,converged\n";
  for (const auto& r : sweep.rows)
    os << fmt12(r.alpha) << ',' << fmt12(r.lambda) << ',' << fmt12(r.residual) << ','
       << (r.converged ? "true" : "false") << '\n';
}

inline json to_json(const TraceResult& r) {
  return {{"S", num(r.S)},
          {"bracket", {num(r.bracket_lo), num(r.bracket_hi)}},
          {"iterations", r.iterations},
          {"lambda_at_S", num(r.lambda_at_S)},
          {"converged", r.converged}};
}

inline void write_trace_csv(std::ostream& os, const TraceSlopeFit& fit) {
  os << "mu,S\n";
  for (std::size_t i = 0; i < fit.mu.size(); ++i) os << fmt12(fit.mu[i]) << ',' << fmt12(fit.S[i]) << '\n';
}

inline json to_json(const TraceSlopeFit& fit) {
  return {{"S_inf", num(fit.S_inf)},
          {"slope", num(fit.slope)},
          {"reference_S_inf", num(fit.reference_S_inf)},
          {"reference_slope", num(fit.reference_slope)}};
}

inline json to_json(const RateFit& f) {
  return {{"slope", num(f.slope)},
          {"intercept", num(f.intercept)},
          {"reference_exponent", num(f.reference_exponent)},
          {"fit_residual", num(f.fit_residual)},
          {"slope_stderr", num(f.slope_stderr)},
          {"points", f.points},
          {"accepted", f.accepted}};
}

inline json to_json(const IsoperimetricComparison& c) {
  const char* order = c.ordering == Ordering::BallBelow    ? "ball_below"
                      : c.ordering == Ordering::ShellBelow ? "shell_below"
                                                           : "equal";
  return {{"rho", num(c.ball_radius)},    {"r", num(c.inner)},
          {"R", num(c.outer)},            {"lambda_ball", num(c.lambda_ball)},
          {"lambda_shell", num(c.lambda_shell)}, {"gap", num(c.gap)},
          {"predicted_gap", num(c.predicted_gap)}, {"ordering", order},
          {"converged", c.converged}};
}

inline json to_json(const ConcentrationReport& r) {
  json mass = json::object(), agmon = json::object();
  for (std::size_t k = 0; k < kLayerMultiples.size(); ++k) {
    const std::string key = fmt12(kLayerMultiples[k]);
    mass[key] = num(r.layer_mass[k]);
    agmon[key] = num(r.agmon_ratio[k]);
  }
  return {{"beta", num(r.beta)},
          {"layer_mass", mass},
          {"decay_slope", num(r.decay_slope)},
          {"truncated_window", r.truncated_window},
          {"localization", num(r.localization)},
          {"agmon_ratio", agmon}};
}

}  // namespace robin::io

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <stdexcept>
#include <variant>
#include <vector>

#include "robin/geometry.hpp"
#include "robin/grid.hpp"
#include "robin/quotient.hpp"
#include "robin/solver.hpp"

namespace robin {

inline constexpr double kMinExponent = 1.01;
inline constexpr double kMaxExponent = 20.0;

/// The solver's exponent range is narrower than (1, inf); outside it the
/// discrete gradient degenerates or stiffens past what the step control handles.
inline void check_solver_exponent(double p) {
  if (!(p > kMinExponent && p < kMaxExponent))
    throw std::invalid_argument("solver: p must lie in (1.01, 20)");
}

/// Boundary-layer rate beta = alpha^{1/(p-1)}.
inline double layer_rate(double p, double alpha) { return std::pow(alpha, 1.0 / (p - 1.0)); }

/// Truncation point of the half-line. Below p = 2 the far-end defect decays
/// like e^{-(p-1) beta L}, so the length in units of 1/beta is stretched by
/// 1/(p-1), up to kMaxTruncation.
inline constexpr double kMaxTruncation = 600.0;

inline double half_line_length(double truncation, double p, double alpha) {
  const double t = std::min(kMaxTruncation, truncation * std::max(1.0, 1.0 / (p - 1.0)));
  return std::max(t, truncation) / layer_rate(p, alpha);
}

/// Radial or normal coordinate range of a meshed domain and the location of
/// its Robin endpoints. Sectors have no layout.
struct Layout {
  double a = 0.0, b = 1.0;
  Endpoint left, right;
  std::function<double(double)> weight;
};

inline Layout layout_of(const Domain& domain, double p, double alpha, const SolverConfig& cfg) {
  validate(domain);
  Layout l;
  const Endpoint far =
      cfg.far == FarEndpoint::DirichletCap ? Endpoint::dirichlet() : Endpoint::natural();
  if (std::holds_alternative<HalfLine>(domain)) {
    if (!(alpha > 0.0)) throw std::invalid_argument("halfline: truncation needs alpha > 0");
    l.b = half_line_length(cfg.truncation, p, alpha);
    l.left = Endpoint::robin(1.0);
    l.right = far;
    l.weight = [](double) { return 1.0; };
  } else if (const auto* iv = std::get_if<Interval>(&domain)) {
    l.b = iv->length;
    l.left = Endpoint::robin(1.0);
    l.right = Endpoint::robin(1.0);
    l.weight = [](double) { return 1.0; };
  } else if (const auto* ball = std::get_if<Ball>(&domain)) {
    l.b = ball->rho;
    l.left = Endpoint::natural();
    l.right = Endpoint::robin(std::pow(ball->rho, ball->nu - 1));
    const int nu = ball->nu;
    l.weight = [nu](double r) { return std::pow(r, nu - 1); };
  } else if (const auto* sh = std::get_if<Shell>(&domain)) {
    l.a = sh->inner;
    l.b = sh->outer;
    l.left = Endpoint::robin(std::pow(sh->inner, sh->nu - 1));
    l.right = Endpoint::robin(std::pow(sh->outer, sh->nu - 1));
    const int nu = sh->nu;
    l.weight = [nu](double r) { return std::pow(r, nu - 1); };
  } else if (const auto* ml = std::get_if<ModelLayer>(&domain)) {
    l.b = ml->depth;
    l.left = Endpoint::robin(1.0);
    l.right = far;
    l.weight = weight_from_curvatures(ml->curvatures, ml->depth);
  } else {
    throw std::invalid_argument("sector domains have no mesh; use the closed form");
  }
  return l;
}

inline ProblemSpec make_problem(const Domain& domain, double p, double alpha,
                                const SolverConfig& cfg) {
  cfg.validate();
  Layout l = layout_of(domain, p, alpha, cfg);
  const bool rl = l.left.kind == EndpointKind::Robin;
  const bool rr = l.right.kind == EndpointKind::Robin;
  const double width = alpha > 0.0 ? cfg.layer_width / layer_rate(p, alpha) : 0.0;
  ProblemSpec spec;
  spec.grid = alpha > 0.0 ? graded_grid(l.a, l.b, rl, rr, width, cfg.cells, cfg.layer_fraction)
                          : uniform_grid(l.a, l.b, cfg.cells);
  spec.weight = std::move(l.weight);
  spec.p = p;
  spec.alpha = alpha;
  spec.left = l.left;
  spec.right = l.right;
  return spec;
}

/// Distance of t to the nearest Robin endpoint of the problem (infinite when
/// there is none).
inline double robin_distance(const ProblemSpec& spec, double t) {
  double d = std::numeric_limits<double>::infinity();
  if (spec.left.kind == EndpointKind::Robin) d = std::min(d, std::abs(t - spec.grid.a()));
  if (spec.right.kind == EndpointKind::Robin) d = std::min(d, std::abs(t - spec.grid.b()));
  return d;
}

/// u0(t) = exp(-beta dist(t, nearest Robin endpoint)).
inline std::vector<double> default_initializer(const ProblemSpec& spec) {
  const double beta = spec.alpha > 0.0 ? layer_rate(spec.p, spec.alpha) : 0.0;
  std::vector<double> u(spec.grid.nodes.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double d = robin_distance(spec, spec.grid.nodes[i]);
    u[i] = std::isfinite(d) ? std::exp(-beta * d) : 1.0;
  }
  return u;
}

/// Constant minimizer of the alpha = 0 problem without Dirichlet endpoints.
inline EigenSolution constant_solution(const QuotientEvaluator& ev) {
  EigenSolution s;
  s.t = ev.grid().nodes;
  s.u.assign(ev.size(), 1.0);
  normalize(ev, s.u);
  s.eigenvalue = 0.0;
  s.residual = euler_lagrange_residual(ev, s.u, 0.0);
  s.converged = true;
  return s;
}

inline bool has_dirichlet(const ProblemSpec& spec) {
  return spec.left.kind == EndpointKind::Dirichlet || spec.right.kind == EndpointKind::Dirichlet;
}

/// Solves a prepared problem; alpha = 0 without Dirichlet endpoints returns
/// the constant function. A warm start (t, u), interpolated onto the grid,
/// replaces the default initializer when it has a lower quotient. With
/// cfg.richardson the returned solution lives on the refined grid and
/// carries the extrapolated eigenvalue.
inline EigenSolution solve_problem(const ProblemSpec& spec, const SolverConfig& cfg,
                                   const EigenSolution* warm = nullptr) {
  check_solver_exponent(spec.p);
  cfg.validate();
  QuotientEvaluator ev(spec);
  if (spec.alpha == 0.0 && !has_dirichlet(spec)) return constant_solution(ev);
  std::vector<double> init = default_initializer(spec);
  if (warm && warm->t.size() > 1) {
    auto w = interpolate(warm->t, warm->u, spec.grid.nodes);
    if (ev.mass(w) > 0.0 && ev.quotient(w) < ev.quotient(init)) init = std::move(w);
  }
  EigenSolution coarse = minimize(ev, cfg, init);
  if (!cfg.richardson) return coarse;

  ProblemSpec fine_spec = spec;
  fine_spec.grid = refined(spec.grid);
  QuotientEvaluator fine_ev(fine_spec);
  EigenSolution fine = minimize(fine_ev, cfg, interpolate(coarse.t, coarse.u, fine_spec.grid.nodes));
  fine.extrapolated = (4.0 * fine.eigenvalue - coarse.eigenvalue) / 3.0;
  fine.converged = fine.converged && coarse.converged;
  fine.iterations += coarse.iterations;
  return fine;
}

/// Principal eigenvalue of the weighted model problem on (0, depth) with
/// weight prod_j (1 - kappa_j t), Robin at t = 0 and the configured far
/// endpoint condition at t = depth.
inline EigenSolution model_layer_eigenvalue(double p, double alpha,
                                            const std::vector<double>& curvatures, double depth,
                                            const SolverConfig& cfg) {
  if (!(alpha > 0.0)) throw std::invalid_argument("model layer: alpha must be positive");
  return solve_problem(make_problem(ModelLayer{curvatures, depth}, p, alpha, cfg), cfg);
}

/// Radial principal eigenvalue of a ball or shell.
inline EigenSolution radial_eigenvalue(const Domain& domain, double p, double alpha,
                                       const SolverConfig& cfg) {
  if (!std::holds_alternative<Ball>(domain) && !std::holds_alternative<Shell>(domain))
    throw std::invalid_argument("radial eigenvalue: domain must be a ball or a shell");
  if (!(alpha >= 0.0)) throw std::invalid_argument("radial eigenvalue: alpha must be >= 0");
  return solve_problem(make_problem(domain, p, alpha, cfg), cfg);
}

/// Numerical principal eigenvalue of any meshed domain (the half-line is
/// truncated at cfg.truncation / beta).
inline EigenSolution solve_domain(const Domain& domain, double p, double alpha,
                                  const SolverConfig& cfg,
                                  const EigenSolution* warm = nullptr) {
  if (!(alpha >= 0.0)) throw std::invalid_argument("solve: alpha must be >= 0");
  check_solver_exponent(p);
  if (alpha == 0.0 && std::holds_alternative<HalfLine>(domain)) {
    EigenSolution s;
    s.t = {0.0};
    s.u = {0.0};
    s.converged = true;  // the infimum 0 is not attained on the half-line
    return s;
  }
  return solve_problem(make_problem(domain, p, alpha, cfg), cfg, warm);
}

/// Spread of the converged eigenvalue across randomly perturbed
/// initializers; a large spread flags a run whose answer depends on the
/// starting point.
struct UniquenessCheck {
  double reference = 0.0;
  double max_deviation = 0.0;
  bool consistent = true;
};

inline UniquenessCheck perturbation_check(const ProblemSpec& spec, const SolverConfig& cfg,
                                          std::uint64_t seed, int trials = 3,
                                          double tolerance = 1e-8) {
  check_solver_exponent(spec.p);
  cfg.validate();
  QuotientEvaluator ev(spec);
  UniquenessCheck out;
  const auto base = default_initializer(spec);
  out.reference = minimize(ev, cfg, base).eigenvalue;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> factor(0.5, 1.5);
  for (int k = 0; k < trials; ++k) {
    auto init = base;
    for (auto& x : init) x *= factor(rng);
    const double v = minimize(ev, cfg, init).eigenvalue;
    out.max_deviation = std::max(out.max_deviation, std::abs(v - out.reference));
  }
  out.consistent = out.max_deviation <= tolerance * std::max(1.0, std::abs(out.reference));
  return out;
}

}  // namespace robin

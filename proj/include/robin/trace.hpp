#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "robin/closed_form.hpp"
#include "robin/geometry.hpp"
#include "robin/problems.hpp"

namespace robin {

/// Raised when alpha -> Lambda(alpha) + 1 cannot be bracketed.
class BracketError : public std::runtime_error {
 public:
  BracketError(const std::string& what, double lambda_lo, double lambda_hi)
      : std::runtime_error(what), lambda_lo_(lambda_lo), lambda_hi_(lambda_hi) {}
  double lambda_lo() const { return lambda_lo_; }
  double lambda_hi() const { return lambda_hi_; }

 private:
  double lambda_lo_, lambda_hi_;
};

/// Raised when an eigenvalue needed by a derived quantity did not converge.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TraceResult {
  double S = 0.0;
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  int iterations = 0;
  double lambda_at_S = 0.0;  // Lambda(Omega, p, S), ideally -1
  bool converged = false;
  bool bracket_consistent = true;  // sign of Lambda + 1 differed at every step
};

/// Eigenvalue as a function of alpha, optionally warm-started from the
/// previous evaluation.
using EigenvalueFn = std::function<double(double alpha, EigenSolution* warm)>;

/// Principal eigenvalue of a domain: closed form for the half-line and for
/// sectors, the numerical solver otherwise.
inline double principal_eigenvalue(const Domain& domain, double p, double alpha,
                                   const SolverConfig& cfg, EigenSolution* warm = nullptr) {
  if (std::holds_alternative<HalfLine>(domain)) return half_line_eigenvalue(p, alpha).value;
  if (const auto* s = std::get_if<Sector>(&domain))
    return alpha > 0.0 ? sector_eigenvalue(s->theta, p, alpha).value : 0.0;
  EigenSolution sol = solve_domain(domain, p, alpha, cfg, warm);
  if (!sol.converged)
    throw ConvergenceError("eigenvalue solve did not converge at alpha = " + std::to_string(alpha));
  const double value = sol.estimate();
  if (warm) *warm = std::move(sol);
  return value;
}

/// Solves Lambda(alpha) = -1 by bisection. The bracket starts at [0, 4 a0]
/// with a0 the root of the half-space formula, doubling the upper end until
/// Lambda drops below -1.
inline TraceResult solve_trace_equation(const EigenvalueFn& eigenvalue, double p, double tol,
                                        int max_iterations = 200) {
  if (!(tol > 0.0)) throw std::invalid_argument("trace: tolerance must be positive");
  TraceResult r;
  EigenSolution warm;
  double lo = 0.0, hi = 4.0 * std::pow(1.0 / (p - 1.0), (p - 1.0) / p);
  double f_lo = 1.0;  // Lambda(0) + 1
  double f_hi = eigenvalue(hi, &warm) + 1.0;
  for (int k = 0; f_hi >= 0.0; ++k) {
    if (k >= 60 || !std::isfinite(f_hi))
      throw BracketError("trace: no alpha with Lambda(alpha) < -1 found", f_lo - 1.0, f_hi - 1.0);
    lo = hi;
    f_lo = f_hi;
    hi *= 2.0;
    f_hi = eigenvalue(hi, &warm) + 1.0;
  }
  if (!(f_lo > 0.0))
    throw BracketError("trace: Lambda + 1 does not change sign", f_lo - 1.0, f_hi - 1.0);

  double mid = 0.5 * (lo + hi), f_mid = 0.0;
  for (r.iterations = 0; r.iterations < max_iterations; ++r.iterations) {
    mid = 0.5 * (lo + hi);
    f_mid = eigenvalue(mid, &warm) + 1.0;
    if (std::abs(f_mid) <= tol) {
      r.converged = true;
      break;
    }
    if (f_mid > 0.0) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
      f_hi = f_mid;
    }
    if (!(f_lo > 0.0 && f_hi < 0.0)) r.bracket_consistent = false;
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) break;
  }
  r.S = mid;
  r.lambda_at_S = f_mid - 1.0;
  r.bracket_lo = lo;
  r.bracket_hi = hi;
  return r;
}

/// Best constant S(Omega, p, p) of the trace embedding, defined by
/// Lambda(Omega, p, S) = -1.
inline TraceResult trace_constant(const Domain& domain, double p, double tol,
                                  const SolverConfig& cfg = {}) {
  validate(domain);
  if (!std::holds_alternative<HalfLine>(domain) && !std::holds_alternative<Sector>(domain))
    check_solver_exponent(p);
  else if (!(p > 1.0))
    throw std::invalid_argument("trace: p must exceed 1");
  EigenvalueFn fn = [&](double alpha, EigenSolution* warm) {
    return principal_eigenvalue(domain, p, alpha, cfg, warm);
  };
  return solve_trace_equation(fn, p, tol);
}

/// The domain dilated by mu.
inline Domain scaled(const Domain& domain, double mu) {
  if (!(mu > 0.0)) throw std::invalid_argument("scale: mu must be positive");
  struct Visitor {
    double mu;
    Domain operator()(const HalfLine& d) const { return d; }
    Domain operator()(const Sector& d) const { return d; }
    Domain operator()(const Interval& d) const { return Interval{mu * d.length}; }
    Domain operator()(const Ball& d) const { return Ball{mu * d.rho, d.nu}; }
    Domain operator()(const Shell& d) const { return Shell{mu * d.inner, mu * d.outer, d.nu}; }
    Domain operator()(const ModelLayer& d) const {
      std::vector<double> k = d.curvatures;
      for (auto& x : k) x /= mu;
      return ModelLayer{std::move(k), mu * d.depth};
    }
  };
  return std::visit(Visitor{mu}, domain);
}

/// Least-squares fit S(mu) = S_inf - slope / mu over dilations of a domain.
struct TraceSlopeFit {
  std::vector<double> mu;
  std::vector<double> S;
  double S_inf = 0.0;
  double slope = 0.0;
  double reference_S_inf = 0.0;
  double reference_slope = 0.0;
};

namespace detail {
struct LineFit {
  double intercept = 0.0, slope = 0.0, rms = 0.0, slope_stderr = 0.0;
};

inline LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) throw std::invalid_argument("fit: need at least two points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw std::invalid_argument("fit: abscissae must not all coincide");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = y[i] - (f.intercept + f.slope * x[i]);
    ss += e * e;
  }
  f.rms = std::sqrt(ss / static_cast<double>(n));
  f.slope_stderr = n > 2 ? std::sqrt(ss / static_cast<double>(n - 2) / sxx) : 0.0;
  return f;
}
}  // namespace detail

inline TraceSlopeFit fit_trace_slope(std::vector<double> mus, std::vector<double> S, double p,
                                     int nu, double h_max, double tol) {
  if (mus.size() < 3) throw std::invalid_argument("trace slope: need at least three dilations");
  TraceSlopeFit fit;
  fit.reference_S_inf = half_space_trace_constant(p);
  fit.reference_slope = trace_slope_coefficient(p, nu, h_max);
  const double slack = 10.0 * tol + 1e-9;
  for (std::size_t i = 1; i < S.size(); ++i) {
    const double step = S[i] - S[i - 1];
    if ((fit.reference_slope >= 0.0 && step < -slack) || (fit.reference_slope < 0.0 && step > slack))
      throw std::runtime_error("trace slope: S(mu) is not monotone in mu");
  }
  std::vector<double> x(mus.size());
  for (std::size_t i = 0; i < mus.size(); ++i) x[i] = 1.0 / mus[i];
  const auto line = detail::fit_line(x, S);
  fit.S_inf = line.intercept;
  fit.slope = -line.slope;
  fit.mu = std::move(mus);
  fit.S = std::move(S);
  return fit;
}

/// Computes S(mu Omega, p, p) for each mu and fits S_inf - slope / mu.
inline TraceSlopeFit trace_expansion_slope(const Domain& domain, double p,
                                           const std::vector<double>& mus, double tol,
                                           const SolverConfig& cfg = {}) {
  if (mus.size() < 3) throw std::invalid_argument("trace slope: need at least three dilations");
  for (std::size_t i = 1; i < mus.size(); ++i)
    if (!(mus[i] > mus[i - 1])) throw std::invalid_argument("trace slope: mu list must increase");
  const auto curv = curvature_data(domain);
  std::vector<double> S;
  for (double mu : mus) S.push_back(trace_constant(scaled(domain, mu), p, tol, cfg).S);
  return fit_trace_slope(mus, std::move(S), p, curv.nu, curv.h_max, tol);
}

/// Lower bound (1 + S(Omega^c) / S(Omega))^{1/p} for the norm of any
/// extension operator out of Omega.
inline double extension_lower_bound(double S_omega, double S_complement, double p) {
  if (!(S_omega > 0.0) || !(S_complement > 0.0))
    throw std::invalid_argument("extension bound: trace constants must be positive");
  if (!(p > 1.0)) throw std::invalid_argument("extension bound: p must exceed 1");
  return std::pow(1.0 + S_complement / S_omega, 1.0 / p);
}

/// Predicted 1/mu coefficient of the extension bound when both Omega and its
/// complement are smooth: (p-1)^{1/p} (nu-1) (H_max + H_min) / (2^{(p-1)/p} p^2).
inline double extension_slope_coefficient(double p, int nu, double h_max, double h_min) {
  return std::pow(p - 1.0, 1.0 / p) * (nu - 1) * (h_max + h_min) /
         (std::pow(2.0, (p - 1.0) / p) * p * p);
}

/// Exterior of a ball approximated by the annulus [rho, rho + L/beta] with
/// Robin at the sphere and a natural condition at the artificial outer
/// radius. Only an approximation of the unbounded problem.
inline EigenSolution exterior_ball_eigenvalue(double rho, int nu, double p, double alpha,
                                              const SolverConfig& cfg,
                                              const EigenSolution* warm = nullptr) {
  validate(Ball{rho, nu});
  check_solver_exponent(p);
  if (!(alpha > 0.0)) throw std::invalid_argument("exterior: alpha must be positive");
  const double beta = layer_rate(p, alpha);
  ProblemSpec spec;
  spec.grid = graded_grid(rho, rho + half_line_length(cfg.truncation, p, alpha), true, false,
                          cfg.layer_width / beta,
                          cfg.cells, cfg.layer_fraction);
  spec.weight = [nu](double r) { return std::pow(r, nu - 1); };
  spec.p = p;
  spec.alpha = alpha;
  spec.left = Endpoint::robin(std::pow(rho, nu - 1));
  spec.right = Endpoint::natural();
  return solve_problem(spec, cfg, warm);
}

/// Assembled 1/mu coefficient of the extension bound for a ball and its
/// (truncated) exterior, next to the predicted value.
struct ExtensionExpansion {
  TraceSlopeFit ball;
  TraceSlopeFit exterior;
  double coefficient = 0.0;
  double reference = 0.0;
};

inline ExtensionExpansion ball_extension_expansion(double rho, int nu, double p,
                                                   const std::vector<double>& mus, double tol,
                                                   const SolverConfig& cfg = {}) {
  ExtensionExpansion out;
  out.ball = trace_expansion_slope(Ball{rho, nu}, p, mus, tol, cfg);
  std::vector<double> S;
  for (double mu : mus) {
    EigenvalueFn fn = [&](double alpha, EigenSolution* warm) {
      EigenSolution sol = exterior_ball_eigenvalue(mu * rho, nu, p, alpha, cfg, warm);
      if (!sol.converged) throw ConvergenceError("exterior solve did not converge");
      const double v = sol.estimate();
      if (warm) *warm = std::move(sol);
      return v;
    };
    S.push_back(solve_trace_equation(fn, p, tol).S);
  }
  out.exterior = fit_trace_slope(mus, std::move(S), p, nu, -1.0 / rho, tol);
  // d/dx (1 + S_E(x)/S_B(x))^{1/p} at x = 1/mu = 0 with S(x) = S_inf - s x.
  const double s_inf = 0.5 * (out.ball.S_inf + out.exterior.S_inf);
  out.coefficient = std::pow(2.0, 1.0 / p - 1.0) / p * (out.ball.slope - out.exterior.slope) / s_inf;
  out.reference = extension_slope_coefficient(p, nu, 1.0 / rho, 1.0 / rho);
  return out;
}

}  // namespace robin

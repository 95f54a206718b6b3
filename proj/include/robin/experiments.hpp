#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <future>
#include <stdexcept>
#include <variant>
#include <vector>

#include "robin/closed_form.hpp"
#include "robin/geometry.hpp"
#include "robin/problems.hpp"
#include "robin/trace.hpp"

namespace robin {

struct SweepRow {
  double alpha = 0.0;
  double lambda = 0.0;
  double residual = 0.0;
  bool converged = false;
};

struct SweepResult {
  Domain domain;
  double p = 2.0;
  SolverConfig config;
  std::vector<SweepRow> rows;
  std::vector<EigenSolution> solutions;  // filled when requested
  bool partial = false;                  // some row did not converge
};

/// One eigenvalue per alpha. With jobs == 1 rows are solved in order and
/// each solve is warm-started from the previous minimizer; with jobs > 1
/// rows run concurrently from the default initializer.
inline SweepResult alpha_sweep(const Domain& domain, double p, const std::vector<double>& alphas,
                               const SolverConfig& cfg, int jobs = 1,
                               bool keep_solutions = false) {
  validate(domain);
  check_solver_exponent(p);
  cfg.validate();
  if (alphas.empty()) throw std::invalid_argument("sweep: empty alpha list");
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    if (!(alphas[i] > 0.0)) throw std::invalid_argument("sweep: alphas must be positive");
    if (i > 0 && !(alphas[i] > alphas[i - 1]))
      throw std::invalid_argument("sweep: alphas must be strictly increasing");
  }
  if (jobs < 1) throw std::invalid_argument("sweep: jobs must be >= 1");

  SweepResult out;
  out.domain = domain;
  out.p = p;
  out.config = cfg;
  std::vector<EigenSolution> sols(alphas.size());
  if (jobs == 1) {
    for (std::size_t i = 0; i < alphas.size(); ++i)
      sols[i] = solve_domain(domain, p, alphas[i], cfg, i > 0 ? &sols[i - 1] : nullptr);
  } else {
    for (std::size_t start = 0; start < alphas.size(); start += static_cast<std::size_t>(jobs)) {
      std::vector<std::future<EigenSolution>> batch;
      const std::size_t end = std::min(alphas.size(), start + static_cast<std::size_t>(jobs));
      for (std::size_t i = start; i < end; ++i)
        batch.push_back(std::async(std::launch::async, [&, i] {
          return solve_domain(domain, p, alphas[i], cfg);
        }));
      for (std::size_t i = start; i < end; ++i) sols[i] = batch[i - start].get();
    }
  }
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    out.rows.push_back({alphas[i], sols[i].estimate(), sols[i].residual, sols[i].converged});
    if (!sols[i].converged) out.partial = true;
  }
  if (keep_solutions) out.solutions = std::move(sols);
  return out;
}

/// Log-log fit of |lambda(alpha) - leading(alpha)| ~ C alpha^slope.
struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;  // log C
  double slope_stderr = 0.0;
  double fit_residual = 0.0;  // rms of the log residuals
  double reference_exponent = 0.0;
  std::size_t points = 0;
  bool accepted = false;  // fit residual within threshold
  bool sublinear = false;  // slope < 1
};

/// Remainder lambda + (p-1) alpha^{p/(p-1)} + (nu-1) H_max alpha.
inline double asymptotic_remainder(double lambda, double p, double alpha, double h_max, int nu) {
  return lambda - leading_asymptote(p, alpha, h_max, nu).value;
}

inline RateFit fit_remainder_rate(const SweepResult& sweep, double h_max, int nu,
                                  double min_decades = 2.0, double max_fit_residual = 0.25) {
  std::vector<double> x, y;
  for (const auto& row : sweep.rows) {
    if (!row.converged) continue;
    const double rem = std::abs(asymptotic_remainder(row.lambda, sweep.p, row.alpha, h_max, nu));
    if (!(rem > 0.0)) continue;
    x.push_back(std::log(row.alpha));
    y.push_back(std::log(rem));
  }
  if (x.size() < 4) throw std::invalid_argument("rate fit: need at least four converged rows");
  if ((x.back() - x.front()) / std::log(10.0) < min_decades - 1e-12)
    throw std::invalid_argument("rate fit: alpha range spans too few decades");
  const auto line = detail::fit_line(x, y);
  RateFit fit;
  fit.slope = line.slope;
  fit.intercept = line.intercept;
  fit.slope_stderr = line.slope_stderr;
  fit.fit_residual = line.rms;
  fit.reference_exponent = reference_remainder_exponent(sweep.p);
  fit.points = x.size();
  fit.accepted = line.rms <= max_fit_residual;
  fit.sublinear = fit.slope < 1.0;
  return fit;
}

enum class Ordering { BallBelow, ShellBelow, Equal };

struct IsoperimetricComparison {
  double ball_radius = 0.0;
  double inner = 0.0;
  double outer = 0.0;
  double lambda_ball = 0.0;
  double lambda_shell = 0.0;
  double gap = 0.0;            // lambda_shell - lambda_ball
  double predicted_gap = 0.0;  // (nu-1)(1/rho - 1/R) alpha
  Ordering ordering = Ordering::Equal;
  bool converged = false;
};

/// Outer radius of the shell with inner radius r and the volume of B_rho.
inline double equal_volume_outer_radius(double rho, double r, int nu) {
  if (!(rho > 0.0) || !(r > 0.0) || nu < 2)
    throw std::invalid_argument("equal volume: need rho, r > 0 and nu >= 2");
  return std::pow(std::pow(rho, nu) + std::pow(r, nu), 1.0 / nu);
}

inline IsoperimetricComparison isoperimetric_compare(double rho, double r, double p, double alpha,
                                                     int nu, const SolverConfig& cfg) {
  IsoperimetricComparison c;
  c.ball_radius = rho;
  c.inner = r;
  c.outer = equal_volume_outer_radius(rho, r, nu);
  const auto ball = radial_eigenvalue(Ball{rho, nu}, p, alpha, cfg);
  const auto shell = radial_eigenvalue(Shell{r, c.outer, nu}, p, alpha, cfg);
  c.lambda_ball = ball.estimate();
  c.lambda_shell = shell.estimate();
  c.converged = ball.converged && shell.converged;
  c.gap = c.lambda_shell - c.lambda_ball;
  c.predicted_gap = (nu - 1) * (1.0 / rho - 1.0 / c.outer) * alpha;
  if (alpha == 0.0 || c.gap == 0.0)
    c.ordering = Ordering::Equal;
  else
    c.ordering = c.gap > 0.0 ? Ordering::BallBelow : Ordering::ShellBelow;
  return c;
}

inline constexpr std::array<double, 4> kLayerMultiples{1.0, 2.0, 5.0, 10.0};

struct ConcentrationReport {
  double beta = 0.0;
  std::array<double, 4> layer_mass{};    // m(a) for a in kLayerMultiples
  double decay_slope = 0.0;              // d log u / d dist over [2/beta, 10/beta]
  bool truncated_window = false;
  double localization = 0.0;             // int (H_max - H) u^p near the boundary
  std::array<double, 4> agmon_ratio{};   // weighted energy beyond a/beta over alpha^{2p/(p-1)}
};

inline ConcentrationReport concentration_report(const EigenSolution& sol, const Domain& domain,
                                                double p, double alpha) {
  if (!(alpha > 0.0)) throw std::invalid_argument("concentration: alpha must be positive");
  if (sol.t.size() < 3 || sol.t.size() != sol.u.size())
    throw std::invalid_argument("concentration: solution has no nodal data");
  const Layout layout = layout_of(domain, p, alpha, SolverConfig{});
  const auto curv = curvature_data(domain);
  // Mean curvature of the boundary component at each Robin endpoint.
  double h_left = curv.h_max, h_right = curv.h_max;
  if (std::holds_alternative<Shell>(domain)) {
    h_left = curv.components[1].mean;
    h_right = curv.components[0].mean;
  }
  const bool robin_left = layout.left.kind == EndpointKind::Robin;
  const bool robin_right = layout.right.kind == EndpointKind::Robin;
  const double a = sol.t.front(), b = sol.t.back();
  auto dist = [&](double t, double* h) {
    const double dl = robin_left ? t - a : std::numeric_limits<double>::infinity();
    const double dr = robin_right ? b - t : std::numeric_limits<double>::infinity();
    if (h) *h = dl <= dr ? h_left : h_right;
    return std::min(dl, dr);
  };

  ConcentrationReport rep;
  rep.beta = layer_rate(p, alpha);
  const double gamma = std::pow(p - 1.0, 1.0 / p) * rep.beta;
  const double scale = std::pow(alpha, 2.0 * p / (p - 1.0));
  const double ap = std::pow(alpha, p / (p - 1.0));
  double total = 0.0;
  std::array<double, 4> inside{};
  for (std::size_t i = 0; i + 1 < sol.t.size(); ++i) {
    const double h = sol.t[i + 1] - sol.t[i];
    const double mid = 0.5 * (sol.t[i] + sol.t[i + 1]);
    const double w = layout.weight(mid);
    const double avg = 0.5 * (sol.u[i] + sol.u[i + 1]);
    const double slope = (sol.u[i + 1] - sol.u[i]) / h;
    const double mass = std::pow(std::abs(avg), p) * w * h;
    double hc = 0.0;
    const double d = dist(mid, &hc);
    total += mass;
    for (std::size_t k = 0; k < kLayerMultiples.size(); ++k) {
      if (d <= kLayerMultiples[k] / rep.beta) inside[k] += mass;
      if (d > kLayerMultiples[k] / rep.beta) {
        const double energy = (std::pow(std::abs(slope), p) + ap * std::pow(std::abs(avg), p)) *
                              std::exp(gamma * d) * w * h;
        rep.agmon_ratio[k] += energy / scale;
      }
    }
    if (d <= 5.0 / rep.beta) rep.localization += (curv.h_max - hc) * mass;
  }
  if (!(total > 0.0)) throw std::invalid_argument("concentration: solution is identically zero");
  for (std::size_t k = 0; k < inside.size(); ++k) rep.layer_mass[k] = inside[k] / total;
  rep.localization /= total;

  std::vector<double> x, y;
  double max_dist = 0.0;
  for (std::size_t i = 0; i < sol.t.size(); ++i) {
    const double d = dist(sol.t[i], nullptr);
    if (std::isfinite(d)) max_dist = std::max(max_dist, d);
    if (d >= 2.0 / rep.beta && d <= 10.0 / rep.beta && sol.u[i] > 0.0) {
      x.push_back(d);
      y.push_back(std::log(sol.u[i]));
    }
  }
  rep.truncated_window = max_dist < 10.0 / rep.beta;
  if (x.size() >= 2) rep.decay_slope = detail::fit_line(x, y).slope;
  return rep;
}

}  // namespace robin

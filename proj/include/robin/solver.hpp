#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "robin/quotient.hpp"

namespace robin {

enum class FarEndpoint { NeumannFree, DirichletCap };

struct SolverConfig {
  int max_iterations = 300;
  double quotient_tol = 1e-10;  // relative decrease of R over one iteration
  double residual_tol = 1e-6;   // Euler-Lagrange residual relative to |lambda|
  double initial_step = 1.0;
  double shrink = 0.5;
  double sufficient_decrease = 1e-4;
  int max_backtracks = 40;
  std::size_t cells = 2000;
  double layer_fraction = 0.5;  // share of cells inside the boundary layers
  double layer_width = 5.0;     // layer width in units of 1/beta
  double truncation = 30.0;     // half-line length in units of 1/beta (stretched for p < 2)
  FarEndpoint far = FarEndpoint::NeumannFree;
  // Solve again on the grid with every cell halved and report the
  // Richardson-extrapolated eigenvalue (the scheme's error is O(h^2)).
  bool richardson = true;

  void validate() const {
    if (max_iterations < 1) throw std::invalid_argument("config: max_iterations must be >= 1");
    if (!(quotient_tol > 0.0) || !(residual_tol > 0.0))
      throw std::invalid_argument("config: tolerances must be positive");
    if (!(initial_step > 0.0)) throw std::invalid_argument("config: initial step must be positive");
    if (!(shrink > 0.0 && shrink < 1.0))
      throw std::invalid_argument("config: shrink factor must lie in (0, 1)");
    if (!(sufficient_decrease > 0.0 && sufficient_decrease < 1.0))
      throw std::invalid_argument("config: sufficient decrease constant must lie in (0, 1)");
    if (max_backtracks < 1) throw std::invalid_argument("config: max_backtracks must be >= 1");
    if (cells < 8) throw std::invalid_argument("config: need at least 8 cells");
    if (!(layer_fraction > 0.0 && layer_fraction < 1.0))
      throw std::invalid_argument("config: layer fraction must lie in (0, 1)");
    if (!(layer_width > 0.0) || !(truncation > layer_width))
      throw std::invalid_argument("config: need 0 < layer_width < truncation");
  }
};

struct EigenSolution {
  double eigenvalue = 0.0;
  std::vector<double> t;  // nodes
  std::vector<double> u;  // nonnegative, sum |u_mid|^p w h = 1
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> history;  // quotient after each accepted step
  std::optional<double> extrapolated;

  /// Best available eigenvalue: extrapolated when present, else discrete.
  double estimate() const { return extrapolated.value_or(eigenvalue); }
};

namespace detail {

inline double floored_pow(double x, double floor, double e) {
  return std::pow(std::max(std::abs(x), floor), e);
}

inline double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

// Relative floor applied to |u'|, |u| before raising to p - 2 in second
// derivatives; the exact Hessian is singular (p > 2) or unbounded (p < 2)
// where these vanish.
inline double hessian_floor(double p) { return p < 2.0 ? 1e-30 : 1e-6; }

// Share of its current value a node keeps when a step would drive it below
// zero; keeps iterates in the nonnegative cone without freezing nodes at 0.
inline constexpr double kBoundaryFraction = 0.1;

struct Workspace {
  std::vector<double> grad_energy, grad_mass, residual;
};

// Residual vector r = (grad J - lambda grad N) / p, zero at pinned nodes.
inline void residual_vector(const QuotientEvaluator& ev, std::span<const double> u, double lambda,
                            Workspace& ws) {
  const std::size_t n = ev.size();
  ws.grad_energy.resize(n);
  ws.grad_mass.resize(n);
  ws.residual.resize(n);
  ev.gradients(u, ws.grad_energy, ws.grad_mass);
  for (std::size_t i = 0; i < n; ++i)
    ws.residual[i] = (ws.grad_energy[i] - lambda * ws.grad_mass[i]) / ev.p();
}

inline double l1(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += std::abs(x);
  return s;
}

// Tridiagonal system, optionally bordered by one extra unknown:
// [T  -b] [x]   [r]
// [b'  0] [y] = [0]
struct ArrowSystem {
  std::vector<double> diag, sub, sup, border;
};

// Tridiagonal second-derivative matrix of (J - lambda N) / p, or, when
// `preconditioner` is set, the positive definite surrogate
// K + c M with the Robin term dropped. Pinned rows become identity rows.
inline ArrowSystem second_variation(const QuotientEvaluator& ev, std::span<const double> u,
                                    double lambda, bool preconditioner,
                                    std::span<const double> border) {
  const std::size_t n = ev.size();
  const std::size_t cells = n - 1;
  const double p = ev.p();
  const auto h = ev.widths();
  const auto w = ev.weights();
  double max_slope = 0.0, max_avg = 0.0;
  for (std::size_t i = 0; i < cells; ++i) {
    max_slope = std::max(max_slope, std::abs(ev.slope(u, i)));
    max_avg = std::max(max_avg, std::abs(ev.average(u, i)));
  }
  const double rel = hessian_floor(p);
  const double fs = std::max(rel * max_slope, std::numeric_limits<double>::min());
  const double fa = std::max(rel * max_avg, std::numeric_limits<double>::min());
  const double mass_coeff = preconditioner ? std::abs(lambda) : -lambda;

  ArrowSystem a;
  a.diag.assign(n, 0.0);
  std::vector<double> off(cells, 0.0);
  for (std::size_t i = 0; i < cells; ++i) {
    const double k = (p - 1.0) * floored_pow(ev.slope(u, i), fs, p - 2.0) * w[i] / h[i];
    const double m =
        (p - 1.0) * floored_pow(ev.average(u, i), fa, p - 2.0) * w[i] * h[i] / 4.0;
    a.diag[i] += k + mass_coeff * m;
    a.diag[i + 1] += k + mass_coeff * m;
    off[i] += -k + mass_coeff * m;
  }
  if (!preconditioner) {
    const auto& spec = ev.spec();
    const double fu = std::max(rel * max_abs(u), std::numeric_limits<double>::min());
    if (spec.left.kind == EndpointKind::Robin)
      a.diag[0] -= ev.alpha() * spec.left.sigma * (p - 1.0) * floored_pow(u[0], fu, p - 2.0);
    if (spec.right.kind == EndpointKind::Robin)
      a.diag[n - 1] -=
          ev.alpha() * spec.right.sigma * (p - 1.0) * floored_pow(u[n - 1], fu, p - 2.0);
  }

  a.sub = off;
  a.sup = off;
  for (std::size_t i = 0; i < n; ++i) {
    if (!ev.pinned(i)) continue;
    a.diag[i] = 1.0;
    if (i > 0) a.sup[i - 1] = a.sub[i - 1] = 0.0;
    if (i < cells) a.sup[i] = a.sub[i] = 0.0;
  }
  if (!border.empty()) {
    a.border.assign(border.begin(), border.end());
    for (std::size_t i = 0; i < n; ++i)
      if (ev.pinned(i)) a.border[i] = 0.0;
  }
  return a;
}

// Gaussian elimination with row pivoting between neighbouring rows, the
// border row eliminated alongside and pivoted against only in the last
// column. O(n). Returns false on a zero pivot or a non-finite result.
inline bool solve_arrow(const ArrowSystem& a, std::span<const double> rhs, std::vector<double>& x) {
  const std::size_t n = a.diag.size();
  const bool bordered = !a.border.empty();
  struct Row {
    double a0, a1, a2, c, r;
  };
  std::vector<Row> rows(n);
  std::vector<double> br = a.border;
  double bc = 0.0, brhs = 0.0, y = 0.0;

  Row cur{a.diag[0], n > 1 ? a.sup[0] : 0.0, 0.0, bordered ? -a.border[0] : 0.0, rhs[0]};
  for (std::size_t i = 0; i + 1 < n; ++i) {
    Row nxt{a.sub[i], a.diag[i + 1], i + 2 < n ? a.sup[i + 1] : 0.0,
            bordered ? -a.border[i + 1] : 0.0, rhs[i + 1]};
    if (std::abs(nxt.a0) > std::abs(cur.a0)) std::swap(cur, nxt);
    if (cur.a0 == 0.0) return false;
    const double f = nxt.a0 / cur.a0;
    Row rest{nxt.a1 - f * cur.a1, nxt.a2 - f * cur.a2, 0.0, nxt.c - f * cur.c, nxt.r - f * cur.r};
    if (bordered) {
      const double g = br[i] / cur.a0;
      br[i + 1] -= g * cur.a1;
      if (i + 2 < n) br[i + 2] -= g * cur.a2;
      bc -= g * cur.c;
      brhs -= g * cur.r;
    }
    rows[i] = cur;
    cur = rest;
  }

  if (bordered) {
    // Last unknown of T together with the border unknown.
    double m00 = cur.a0, m01 = cur.c, r0 = cur.r;
    double m10 = br[n - 1], m11 = bc, r1 = brhs;
    if (std::abs(m10) > std::abs(m00)) {
      std::swap(m00, m10);
      std::swap(m01, m11);
      std::swap(r0, r1);
    }
    if (m00 == 0.0) return false;
    const double f = m10 / m00;
    const double s = m11 - f * m01;
    if (s == 0.0) return false;
    y = (r1 - f * r0) / s;
    rows[n - 1] = {m00, 0.0, 0.0, m01, r0};
  } else {
    if (cur.a0 == 0.0) return false;
    rows[n - 1] = cur;
  }

  x.assign(bordered ? n + 1 : n, 0.0);
  if (bordered) x[n] = y;
  for (std::size_t k = n; k-- > 0;) {
    const Row& r = rows[k];
    double v = r.r - r.c * y;
    if (k + 1 < n) v -= r.a1 * x[k + 1];
    if (k + 2 < n) v -= r.a2 * x[k + 2];
    x[k] = v / r.a0;
    if (!std::isfinite(x[k])) return false;
  }
  return std::isfinite(y);
}

}  // namespace detail

/// Euler-Lagrange defect of a nodal function: the l1 norm of
/// (grad J - lambda grad N) / p over unpinned nodes. Interior entries
/// approximate the strong residual of (|u'|^{p-2} u' w)' + lambda u^{p-1} w
/// integrated over the node's control volume; endpoint entries measure the
/// Robin (or natural) boundary condition defect.
inline double euler_lagrange_residual(const QuotientEvaluator& ev, std::span<const double> u,
                                      double lambda) {
  detail::Workspace ws;
  detail::residual_vector(ev, u, lambda, ws);
  return detail::l1(ws.residual);
}

inline double euler_lagrange_residual(const EigenSolution& sol, const QuotientEvaluator& ev) {
  if (sol.u.size() != ev.size())
    throw std::invalid_argument("residual: solution does not match the grid");
  return euler_lagrange_residual(ev, sol.u, sol.eigenvalue);
}

/// Scales u so that N(u) = 1.
inline void normalize(const QuotientEvaluator& ev, std::vector<double>& u) {
  const double n = ev.mass(u);
  if (!(n > 0.0)) throw std::invalid_argument("normalize: zero function");
  const double s = std::pow(n, -1.0 / ev.p());
  for (auto& x : u) x *= s;
}

/// Minimizes the discrete quotient over nonnegative nodal vectors.
///
/// Each iteration picks a search direction on the sphere N(u) = 1, backtracks
/// along it until the Armijo condition on R holds, projects the trial point
/// onto the nonnegative cone and renormalizes. Nodes that a step would push
/// below zero keep a fixed fraction of their current value instead. The direction is the Newton step
/// of the bordered Euler-Lagrange system in (u, lambda) when that step is a
/// descent direction, otherwise the gradient preconditioned by a weighted
/// p-stiffness matrix.
inline EigenSolution minimize(const QuotientEvaluator& ev, const SolverConfig& cfg,
                              std::span<const double> init) {
  cfg.validate();
  const std::size_t n = ev.size();
  if (init.size() != n) throw std::invalid_argument("minimize: initializer has wrong size");

  std::vector<double> u(init.begin(), init.end());
  for (std::size_t i = 0; i < n; ++i)
    if (ev.pinned(i) || !(u[i] > 0.0)) u[i] = 0.0;
  if (!(ev.mass(u) > 0.0)) throw std::invalid_argument("minimize: initializer is identically zero");
  normalize(ev, u);

  EigenSolution sol;
  sol.t = ev.grid().nodes;
  double lambda = ev.quotient(u);
  double last_decrease = std::numeric_limits<double>::infinity();
  detail::Workspace ws, trial_ws;
  std::vector<double> trial(n);

  auto try_point = [&](std::span<const double> d, double step) {
    for (std::size_t i = 0; i < n; ++i) {
      const double v = u[i] + step * d[i];
      trial[i] = ev.pinned(i) ? 0.0 : (v > 0.0 ? v : detail::kBoundaryFraction * u[i]);
    }
    const double m = ev.mass(trial);
    if (!(m > 0.0) || !std::isfinite(m)) return std::numeric_limits<double>::infinity();
    const double s = std::pow(m, -1.0 / ev.p());
    for (auto& x : trial) x *= s;
    const double r = ev.quotient(trial);
    return std::isfinite(r) ? r : std::numeric_limits<double>::infinity();
  };

  int iter = 0;
  for (;; ++iter) {
    detail::residual_vector(ev, u, lambda, ws);
    sol.residual = detail::l1(ws.residual);
    const double scale = std::max(std::abs(lambda), std::numeric_limits<double>::min());
    if (last_decrease < cfg.quotient_tol && sol.residual < cfg.residual_tol * scale) {
      sol.converged = true;
      break;
    }
    if (iter >= cfg.max_iterations) break;

    // Directional derivative of R along d is (g . d) with g = p * residual.
    std::vector<double> rhs(n), border(n), x;
    for (std::size_t i = 0; i < n; ++i) {
      rhs[i] = -ws.residual[i];
      border[i] = ws.grad_mass[i] / ev.p();
    }

    bool accepted = false;
    double next = lambda;
    auto line_search = [&](std::vector<double> d, bool newton) {
      double slope = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (ev.pinned(i)) d[i] = 0.0;
        slope += ev.p() * ws.residual[i] * d[i];
      }
      if (!(slope < 0.0)) return;
      double step = cfg.initial_step;
      for (int b = 0; b < cfg.max_backtracks; ++b, step *= cfg.shrink) {
        double r = try_point(d, step);
        if (newton && b == 0 && ev.p() < 2.0) {
          // Below p = 2 the Newton step maps a kink slope s to -s; the secant
          // step, p - 1 times shorter, removes it.
          std::vector<double> full(trial);
          const double secant = try_point(d, (ev.p() - 1.0) * step);
          if (secant < r) {
            r = secant;
            step *= ev.p() - 1.0;
          } else {
            trial.swap(full);
          }
        }
        if (r <= lambda + cfg.sufficient_decrease * step * slope) {
          accepted = true;
        } else if (newton && b == 0 && r <= lambda + 1e-13 * std::abs(lambda)) {
          // Full Newton step within rounding of the current quotient: keep
          // it if it reduces the Euler-Lagrange defect.
          detail::residual_vector(ev, trial, r, trial_ws);
          accepted = detail::l1(trial_ws.residual) < sol.residual;
        }
        if (accepted) {
          next = r;
          return;
        }
      }
    };

    if (detail::solve_arrow(detail::second_variation(ev, u, lambda, false, border), rhs, x)) {
      x.resize(n);
      line_search(x, true);
    }
    if (!accepted &&
        detail::solve_arrow(detail::second_variation(ev, u, lambda, true, {}), rhs, x))
      line_search(x, false);
    if (!accepted) break;
    u.swap(trial);
    last_decrease = (lambda - next) / std::max(std::abs(next), std::numeric_limits<double>::min());
    lambda = next;
    sol.history.push_back(lambda);
  }

  sol.iterations = iter;
  sol.eigenvalue = lambda;
  sol.u = std::move(u);
  return sol;
}

}  // namespace robin

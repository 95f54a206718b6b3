#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

#include "robin/geometry.hpp"

namespace robin {

/// An exact value together with the name of the formula that produced it.
struct ClosedFormValue {
  double value = 0.0;
  std::string formula;
};

namespace detail {
inline void require_exponent(double p) {
  if (!(p > 1.0) || !std::isfinite(p)) throw std::invalid_argument("closed form: p must exceed 1");
}
}  // namespace detail

/// (1 - p) alpha^{p/(p-1)}; the value on every half-space.
inline ClosedFormValue half_line_eigenvalue(double p, double alpha) {
  detail::require_exponent(p);
  if (!(alpha >= 0.0)) throw std::invalid_argument("closed form: alpha must be >= 0");
  return {(1.0 - p) * std::pow(alpha, p / (p - 1.0)), "half_line"};
}

/// exp(-alpha^{1/(p-1)} t), the half-line minimizer.
inline ClosedFormValue half_line_minimizer(double p, double alpha, double t) {
  detail::require_exponent(p);
  if (!(t >= 0.0)) throw std::invalid_argument("closed form: t must be >= 0");
  return {std::exp(-std::pow(alpha, 1.0 / (p - 1.0)) * t), "half_line_minimizer"};
}

/// Infinite planar sector of opening |arg z| < theta. Blunt sectors share
/// the half-plane value; acute ones see alpha / sin(theta).
inline ClosedFormValue sector_eigenvalue(double theta, double p, double alpha) {
  detail::require_exponent(p);
  if (!(theta > 0.0 && theta < kPi)) throw std::invalid_argument("sector: theta must lie in (0, pi)");
  if (!(alpha > 0.0)) throw std::invalid_argument("sector: alpha must be positive");
  if (theta >= kPi / 2.0) return {half_line_eigenvalue(p, alpha).value, "sector_blunt"};
  return {(1.0 - p) * std::pow(alpha / std::sin(theta), p / (p - 1.0)), "sector_acute"};
}

/// c(p) = max{(1 - 2^{1/(1-p)})^{1-p}, 1}, the constant in
/// (a + b)^p <= (1 + eps) a^p + c eps^{1-p} b^p.
inline ClosedFormValue aux_inequality_constant(double p) {
  detail::require_exponent(p);
  const double c = std::pow(1.0 - std::pow(2.0, 1.0 / (1.0 - p)), 1.0 - p);
  return {std::max(c, 1.0), "aux_inequality"};
}

struct InequalityCheck {
  std::size_t samples = 0;
  std::size_t violations = 0;
  double worst_ratio = 0.0;  // max of lhs / rhs over the samples
};

/// Samples a, b log-uniform on [1e-3, 1e3] and eps uniform in (0, 1) and
/// counts violations of (a + b)^p <= (1 + eps) a^p + c(p) eps^{1-p} b^p.
inline InequalityCheck check_aux_inequality(double p, std::size_t samples, std::uint64_t seed) {
  const double c = aux_inequality_constant(p).value;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> log_ab(std::log(1e-3), std::log(1e3));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  InequalityCheck out;
  out.samples = samples;
  for (std::size_t k = 0; k < samples; ++k) {
    const double a = std::exp(log_ab(rng));
    const double b = std::exp(log_ab(rng));
    double eps = unit(rng);
    while (eps <= 0.0) eps = unit(rng);
    const double lhs = std::pow(a + b, p);
    const double rhs = (1.0 + eps) * std::pow(a, p) + c * std::pow(eps, 1.0 - p) * std::pow(b, p);
    const double ratio = lhs / rhs;
    out.worst_ratio = std::max(out.worst_ratio, ratio);
    // Relative slack of a few ulps for rounding in pow.
    if (lhs > rhs * (1.0 + 1e-13)) ++out.violations;
  }
  return out;
}

/// First two terms of the large-alpha expansion,
/// -(p-1) alpha^{p/(p-1)} - (nu-1) H_max alpha.
inline ClosedFormValue leading_asymptote(double p, double alpha, double h_max, int nu) {
  detail::require_exponent(p);
  if (nu < 1) throw std::invalid_argument("leading asymptote: nu must be >= 1");
  return {-(p - 1.0) * std::pow(alpha, p / (p - 1.0)) - (nu - 1) * h_max * alpha,
          "leading_asymptote"};
}

/// Best trace constant of the half-space, (p-1)^{(1-p)/p}.
inline double half_space_trace_constant(double p) {
  detail::require_exponent(p);
  return std::pow(p - 1.0, (1.0 - p) / p);
}

/// Coefficient s in S(mu Omega) = S_half - s / mu + o(1/mu).
inline double trace_slope_coefficient(double p, int nu, double h_max) {
  detail::require_exponent(p);
  return std::pow(p - 1.0, (2.0 - p) / p) * (nu - 1) * h_max / p;
}

/// Remainder exponent 1 - kappa for boundaries smooth enough that the
/// improved O(alpha^{1-kappa}) remainder applies.
inline double reference_remainder_exponent(double p) {
  detail::require_exponent(p);
  const double kappa = p <= 2.0 ? 2.0 / (p + 2.0) : 1.0 / (2.0 * (p - 1.0));
  return 1.0 - kappa;
}

}  // namespace robin

#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "robin/grid.hpp"

namespace robin {

enum class EndpointKind { Natural, Robin, Dirichlet };

struct Endpoint {
  EndpointKind kind = EndpointKind::Natural;
  double sigma = 0.0;  // surface measure factor, Robin endpoints only

  static Endpoint natural() { return {}; }
  static Endpoint robin(double sigma) { return {EndpointKind::Robin, sigma}; }
  static Endpoint dirichlet() { return {EndpointKind::Dirichlet, 0.0}; }
};

/// Weighted one-dimensional p-Rayleigh quotient with Robin endpoint terms.
struct ProblemSpec {
  Grid1D grid;
  std::function<double(double)> weight;
  double p = 2.0;
  double alpha = 0.0;
  Endpoint left;
  Endpoint right;
};

inline double signed_pow(double x, double e) {
  return x < 0.0 ? -std::pow(-x, e) : std::pow(x, e);
}

/// Discrete quotient on piecewise-linear nodal vectors, midpoint quadrature
/// for both integrals:
///   J(u) = sum_i |du_i/h_i|^p w_i h_i - alpha sum_b sigma_b |u_b|^p
///   N(u) = sum_i |(u_i + u_{i+1})/2|^p w_i h_i
/// A Dirichlet endpoint is read as zero whatever the stored value.
class QuotientEvaluator {
 public:
  explicit QuotientEvaluator(ProblemSpec spec) : spec_(std::move(spec)) {
    const auto& g = spec_.grid;
    if (g.nodes.size() < 3) throw std::invalid_argument("assemble: grid too small");
    if (!(spec_.p > 1.0) || !std::isfinite(spec_.p))
      throw std::invalid_argument("assemble: p must exceed 1");
    if (!(spec_.alpha >= 0.0) || !std::isfinite(spec_.alpha))
      throw std::invalid_argument("assemble: alpha must be nonnegative");
    for (const Endpoint* e : {&spec_.left, &spec_.right})
      if (e->kind == EndpointKind::Robin && !(e->sigma > 0.0))
        throw std::invalid_argument("assemble: Robin boundary weight must be positive");
    if (spec_.left.kind == EndpointKind::Dirichlet && spec_.right.kind == EndpointKind::Dirichlet)
      throw std::invalid_argument("assemble: at most one Dirichlet endpoint");
    if (!spec_.weight) throw std::invalid_argument("assemble: missing weight");
    const std::size_t n = g.cells();
    h_.resize(n);
    w_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      h_[i] = g.width(i);
      if (!(h_[i] > 0.0)) throw std::invalid_argument("assemble: grid not increasing");
      w_[i] = spec_.weight(g.midpoint(i));
      if (!(w_[i] > 0.0) || !std::isfinite(w_[i]))
        throw std::invalid_argument("assemble: weight must be positive and finite");
    }
  }

  const ProblemSpec& spec() const { return spec_; }
  const Grid1D& grid() const { return spec_.grid; }
  std::size_t size() const { return spec_.grid.nodes.size(); }
  std::span<const double> widths() const { return h_; }
  std::span<const double> weights() const { return w_; }
  double p() const { return spec_.p; }
  double alpha() const { return spec_.alpha; }

  bool pinned(std::size_t i) const {
    return (i == 0 && spec_.left.kind == EndpointKind::Dirichlet) ||
           (i + 1 == size() && spec_.right.kind == EndpointKind::Dirichlet);
  }

  double value(std::span<const double> u, std::size_t i) const {
    return pinned(i) ? 0.0 : u[i];
  }

  double slope(std::span<const double> u, std::size_t cell) const {
    return (value(u, cell + 1) - value(u, cell)) / h_[cell];
  }

  double average(std::span<const double> u, std::size_t cell) const {
    return 0.5 * (value(u, cell) + value(u, cell + 1));
  }

  double boundary_term(std::span<const double> u) const {
    double s = 0.0;
    if (spec_.left.kind == EndpointKind::Robin)
      s += spec_.left.sigma * std::pow(std::abs(u[0]), spec_.p);
    if (spec_.right.kind == EndpointKind::Robin)
      s += spec_.right.sigma * std::pow(std::abs(u[size() - 1]), spec_.p);
    return spec_.alpha * s;
  }

  double kinetic(std::span<const double> u) const {
    check(u);
    double s = 0.0;
    for (std::size_t i = 0; i < h_.size(); ++i)
      s += std::pow(std::abs(slope(u, i)), spec_.p) * w_[i] * h_[i];
    return s;
  }

  double energy(std::span<const double> u) const { return kinetic(u) - boundary_term(u); }

  double mass(std::span<const double> u) const {
    check(u);
    double s = 0.0;
    for (std::size_t i = 0; i < h_.size(); ++i)
      s += std::pow(std::abs(average(u, i)), spec_.p) * w_[i] * h_[i];
    return s;
  }

  double quotient(std::span<const double> u) const {
    const double n = mass(u);
    if (!(n > 0.0)) throw std::invalid_argument("quotient: zero function has no quotient");
    return energy(u) / n;
  }

  /// Gradients of J and N with respect to the nodal values. Entries at a
  /// pinned node are zero.
  void gradients(std::span<const double> u, std::span<double> grad_energy,
                 std::span<double> grad_mass) const {
    check(u);
    const double p = spec_.p;
    std::fill(grad_energy.begin(), grad_energy.end(), 0.0);
    std::fill(grad_mass.begin(), grad_mass.end(), 0.0);
    for (std::size_t i = 0; i < h_.size(); ++i) {
      const double flux = p * signed_pow(slope(u, i), p - 1.0) * w_[i];
      grad_energy[i] -= flux;
      grad_energy[i + 1] += flux;
      const double m = 0.5 * p * signed_pow(average(u, i), p - 1.0) * w_[i] * h_[i];
      grad_mass[i] += m;
      grad_mass[i + 1] += m;
    }
    const std::size_t last = size() - 1;
    if (spec_.left.kind == EndpointKind::Robin)
      grad_energy[0] -= spec_.alpha * spec_.left.sigma * p * signed_pow(u[0], p - 1.0);
    if (spec_.right.kind == EndpointKind::Robin)
      grad_energy[last] -=
          spec_.alpha * spec_.right.sigma * p * signed_pow(u[last], p - 1.0);
    for (std::size_t i : {std::size_t{0}, last})
      if (pinned(i)) grad_energy[i] = grad_mass[i] = 0.0;
  }

 private:
  void check(std::span<const double> u) const {
    if (u.size() != size()) throw std::invalid_argument("quotient: nodal vector has wrong size");
  }

  ProblemSpec spec_;
  std::vector<double> h_;
  std::vector<double> w_;
};

inline QuotientEvaluator assemble(ProblemSpec spec) { return QuotientEvaluator(std::move(spec)); }

}  // namespace robin

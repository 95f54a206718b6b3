#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace robin {

inline constexpr double kPi = 3.14159265358979323846;

// Domain descriptors. Radial domains (Ball, Shell) are solved on the radial
// coordinate; HalfLine, Interval and ModelLayer on the distance to the boundary.

struct HalfLine {};

struct Interval {
  double length;
};

struct Ball {
  double rho;
  int nu;
};

struct Shell {
  double inner;
  double outer;
  int nu;
};

struct Sector {
  double theta;
};

struct ModelLayer {
  std::vector<double> curvatures;
  double depth;
};

using Domain = std::variant<HalfLine, Interval, Ball, Shell, Sector, ModelLayer>;

inline std::string kind_name(const Domain& domain) {
  struct Visitor {
    std::string operator()(const HalfLine&) const { return "halfline"; }
    std::string operator()(const Interval&) const { return "interval"; }
    std::string operator()(const Ball&) const { return "ball"; }
    std::string operator()(const Shell&) const { return "shell"; }
    std::string operator()(const Sector&) const { return "sector"; }
    std::string operator()(const ModelLayer&) const { return "model_layer"; }
  };
  return std::visit(Visitor{}, domain);
}

/// Ambient dimension of the domain. The half-line and the interval count as
/// one-dimensional, sectors as planar, model layers as (#curvatures + 1).
inline int dimension(const Domain& domain) {
  struct Visitor {
    int operator()(const HalfLine&) const { return 1; }
    int operator()(const Interval&) const { return 1; }
    int operator()(const Ball& b) const { return b.nu; }
    int operator()(const Shell& s) const { return s.nu; }
    int operator()(const Sector&) const { return 2; }
    int operator()(const ModelLayer& m) const {
      return static_cast<int>(m.curvatures.size()) + 1;
    }
  };
  return std::visit(Visitor{}, domain);
}

inline double max_abs_curvature(const std::vector<double>& kappa) {
  double m = 0.0;
  for (double k : kappa) m = std::max(m, std::abs(k));
  return m;
}

/// Throws std::invalid_argument when the descriptor violates its invariants.
inline void validate(const Domain& domain) {
  struct Visitor {
    void operator()(const HalfLine&) const {}
    void operator()(const Interval& i) const {
      if (!(i.length > 0.0) || !std::isfinite(i.length))
        throw std::invalid_argument("interval: length must be positive");
    }
    void operator()(const Ball& b) const {
      if (!(b.rho > 0.0) || !std::isfinite(b.rho))
        throw std::invalid_argument("ball: rho must be positive");
      if (b.nu < 2) throw std::invalid_argument("ball: nu must be >= 2");
    }
    void operator()(const Shell& s) const {
      if (!(s.inner > 0.0) || !(s.outer > s.inner) || !std::isfinite(s.outer))
        throw std::invalid_argument("shell: need 0 < r < R");
      if (s.nu < 2) throw std::invalid_argument("shell: nu must be >= 2");
    }
    void operator()(const Sector& s) const {
      if (!(s.theta > 0.0 && s.theta < kPi))
        throw std::invalid_argument("sector: theta must lie in (0, pi)");
    }
    void operator()(const ModelLayer& m) const {
      if (!(m.depth > 0.0) || !std::isfinite(m.depth))
        throw std::invalid_argument("model_layer: depth must be positive");
      for (double k : m.curvatures)
        if (!std::isfinite(k))
          throw std::invalid_argument("model_layer: curvatures must be finite");
      if (m.depth * max_abs_curvature(m.curvatures) > 0.5)
        throw std::invalid_argument(
            "model_layer: depth * max|kappa| must not exceed 1/2");
    }
  };
  std::visit(Visitor{}, domain);
}

// ---------------------------------------------------------------------------
// Curvature data

/// Curvature of one boundary component. Signs follow the outward normal, so
/// the inner sphere of a shell has negative curvature.
struct BoundaryComponent {
  std::vector<double> principal;
  double mean = 0.0;
};

struct CurvatureData {
  std::vector<BoundaryComponent> components;
  double h_max = 0.0;
  double h_min = 0.0;
  int nu = 1;

  /// M = (nu-1) H_max, the coefficient of the linear term in the asymptotics.
  double m_max() const { return (nu - 1) * h_max; }
};

inline BoundaryComponent make_component(std::vector<double> principal) {
  BoundaryComponent c;
  c.principal = std::move(principal);
  if (!c.principal.empty())
    c.mean = std::accumulate(c.principal.begin(), c.principal.end(), 0.0) /
             static_cast<double>(c.principal.size());
  return c;
}

inline CurvatureData curvature_data(const Domain& domain) {
  validate(domain);
  CurvatureData data;
  data.nu = dimension(domain);
  struct Visitor {
    CurvatureData& d;
    void operator()(const HalfLine&) const { d.components = {make_component({})}; }
    void operator()(const Interval&) const {
      d.components = {make_component({}), make_component({})};
    }
    void operator()(const Ball& b) const {
      d.components = {make_component(std::vector<double>(b.nu - 1, 1.0 / b.rho))};
    }
    void operator()(const Shell& s) const {
      d.components = {
          make_component(std::vector<double>(s.nu - 1, 1.0 / s.outer)),
          make_component(std::vector<double>(s.nu - 1, -1.0 / s.inner))};
    }
    // Straight edges away from the corner; the corner itself carries no
    // curvature data.
    void operator()(const Sector&) const {
      d.components = {make_component({0.0}), make_component({0.0})};
    }
    void operator()(const ModelLayer& m) const {
      d.components = {make_component(m.curvatures)};
    }
  };
  std::visit(Visitor{data}, domain);
  data.h_max = data.components.front().mean;
  data.h_min = data.h_max;
  for (const auto& c : data.components) {
    data.h_max = std::max(data.h_max, c.mean);
    data.h_min = std::min(data.h_min, c.mean);
  }
  return data;
}

// ---------------------------------------------------------------------------
// Boundary-layer weight phi(t) = prod_j (1 - kappa_j t)

class WeightProfile {
 public:
  WeightProfile() : coeffs_{1.0} {}
  WeightProfile(std::vector<double> coeffs, double depth)
      : coeffs_(std::move(coeffs)), depth_(depth) {}

  /// Coefficients in increasing degree: phi(t) = sum_k c_k t^k.
  const std::vector<double>& coefficients() const { return coeffs_; }
  double depth() const { return depth_; }

  double operator()(double t) const {
    double acc = 0.0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * t + *it;
    return acc;
  }

  /// M = -phi'(0) = sum of the curvatures.
  double linear_coefficient() const {
    return coeffs_.size() > 1 ? -coeffs_[1] : 0.0;
  }

 private:
  std::vector<double> coeffs_;
  double depth_ = 0.0;
};

inline WeightProfile weight_from_curvatures(const std::vector<double>& kappa,
                                            double depth) {
  if (!(depth > 0.0)) throw std::invalid_argument("weight: depth must be positive");
  if (depth * max_abs_curvature(kappa) > 0.5)
    throw std::invalid_argument(
        "weight: depth * max|kappa| > 1/2, weight positivity not guaranteed");
  std::vector<double> c{1.0};
  for (double k : kappa) {
    std::vector<double> next(c.size() + 1, 0.0);
    for (std::size_t i = 0; i < c.size(); ++i) {
      next[i] += c[i];
      next[i + 1] -= k * c[i];
    }
    c = std::move(next);
  }
  return WeightProfile(std::move(c), depth);
}

/// Radial volume factor r^(nu-1) for balls and shells.
inline double radial_weight(const Domain& domain, double r) {
  if (const auto* b = std::get_if<Ball>(&domain)) {
    if (r < 0.0 || r > b->rho) throw std::out_of_range("radial_weight: r outside [0, rho]");
    return std::pow(r, b->nu - 1);
  }
  if (const auto* s = std::get_if<Shell>(&domain)) {
    if (r < s->inner || r > s->outer)
      throw std::out_of_range("radial_weight: r outside [r, R]");
    return std::pow(r, s->nu - 1);
  }
  throw std::invalid_argument("radial_weight: domain is not radial");
}

}  // namespace robin

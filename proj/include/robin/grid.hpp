#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace robin {

/// Strictly increasing mesh over [a, b] with optional clustering at the
/// Robin endpoints.
struct Grid1D {
  std::vector<double> nodes;
  double layer_width = 0.0;     // width of each clustered layer (0: uniform)
  double layer_fraction = 0.0;  // share of cells placed inside the layers

  std::size_t cells() const { return nodes.size() - 1; }
  double a() const { return nodes.front(); }
  double b() const { return nodes.back(); }
  double width(std::size_t i) const { return nodes[i + 1] - nodes[i]; }
  double midpoint(std::size_t i) const { return 0.5 * (nodes[i] + nodes[i + 1]); }
};

inline Grid1D uniform_grid(double a, double b, std::size_t cells) {
  if (!(b > a)) throw std::invalid_argument("grid: need a < b");
  if (cells < 1) throw std::invalid_argument("grid: need at least one cell");
  Grid1D g;
  g.nodes.resize(cells + 1);
  for (std::size_t i = 0; i <= cells; ++i)
    g.nodes[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(cells);
  g.nodes.back() = b;
  return g;
}

namespace detail {

// Widths of n cells covering `length`, the first one no smaller than h0 and
// growing geometrically. Falls back to uniform cells when n*h0 already
// exceeds the length.
inline std::vector<double> geometric_widths(double h0, std::size_t n, double length) {
  std::vector<double> widths(n);
  const double nd = static_cast<double>(n);
  if (nd * h0 >= length) {
    std::fill(widths.begin(), widths.end(), length / nd);
    return widths;
  }
  // sum_{j=1..n} h0 q^j = length, solved for q > 1 by bisection in log q.
  auto total = [&](double log_q) {
    double s = 0.0, w = h0;
    for (std::size_t j = 0; j < n; ++j) {
      w *= std::exp(log_q);
      s += w;
      if (!std::isfinite(s)) return s;
    }
    return s;
  };
  double lo = 0.0, hi = 1.0;
  while (total(hi) < length) hi *= 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (total(mid) < length ? lo : hi) = mid;
  }
  const double q = std::exp(0.5 * (lo + hi));
  double w = h0, s = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    w *= q;
    widths[j] = w;
    s += w;
  }
  for (auto& x : widths) x *= length / s;
  return widths;
}

}  // namespace detail

/// Mesh with `layer_fraction` of the cells spread uniformly over a layer of
/// width `layer_width` at each clustered endpoint; the remaining cells grow
/// geometrically away from the layers. When the layers would cover the
/// whole interval the mesh is uniform.
inline Grid1D graded_grid(double a, double b, bool cluster_left, bool cluster_right,
                          double layer_width, std::size_t cells,
                          double layer_fraction = 0.5) {
  if (!(b > a)) throw std::invalid_argument("grid: need a < b");
  if (cells < 4) throw std::invalid_argument("grid: need at least four cells");
  if (!(layer_fraction > 0.0 && layer_fraction < 1.0))
    throw std::invalid_argument("grid: layer fraction must lie in (0, 1)");
  const int k = static_cast<int>(cluster_left) + static_cast<int>(cluster_right);
  const double length = b - a;
  if (k == 0 || !(layer_width > 0.0) || k * layer_width >= length) {
    Grid1D g = uniform_grid(a, b, cells);
    g.layer_width = k == 0 ? 0.0 : std::min(layer_width, length);
    g.layer_fraction = 1.0;
    return g;
  }

  const std::size_t per_layer = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::ceil(layer_fraction * cells / k)));
  const std::size_t rest = cells - k * per_layer;
  const double h0 = layer_width / static_cast<double>(per_layer);

  std::vector<double> widths;  // left to right
  widths.reserve(cells);
  auto push_layer = [&] {
    for (std::size_t i = 0; i < per_layer; ++i) widths.push_back(h0);
  };
  if (k == 2) {
    const std::size_t n_left = rest / 2, n_right = rest - n_left;
    const double half = 0.5 * (length - 2.0 * layer_width);
    push_layer();
    for (double w : detail::geometric_widths(h0, n_left, half)) widths.push_back(w);
    auto right = detail::geometric_widths(h0, n_right, half);
    widths.insert(widths.end(), right.rbegin(), right.rend());
    push_layer();
  } else if (cluster_left) {
    push_layer();
    for (double w : detail::geometric_widths(h0, rest, length - layer_width))
      widths.push_back(w);
  } else {
    auto grow = detail::geometric_widths(h0, rest, length - layer_width);
    widths.insert(widths.end(), grow.rbegin(), grow.rend());
    push_layer();
  }

  Grid1D g;
  g.nodes.resize(widths.size() + 1);
  g.nodes[0] = a;
  for (std::size_t i = 0; i < widths.size(); ++i) g.nodes[i + 1] = g.nodes[i] + widths[i];
  g.nodes.back() = b;
  // Pin the layer edges exactly so the clustered nodes sit inside the layer.
  if (cluster_left) g.nodes[per_layer] = a + layer_width;
  if (cluster_right) g.nodes[cells - per_layer] = b - layer_width;
  g.layer_width = layer_width;
  g.layer_fraction = static_cast<double>(k * per_layer) / static_cast<double>(cells);
  for (std::size_t i = 0; i < cells; ++i)
    if (!(g.nodes[i + 1] > g.nodes[i]))
      throw std::runtime_error("grid: generated non-increasing nodes");
  return g;
}

/// Grid with every cell split at its midpoint.
inline Grid1D refined(const Grid1D& g) {
  Grid1D r = g;
  r.nodes.clear();
  r.nodes.reserve(2 * g.nodes.size() - 1);
  for (std::size_t i = 0; i + 1 < g.nodes.size(); ++i) {
    r.nodes.push_back(g.nodes[i]);
    r.nodes.push_back(g.midpoint(i));
  }
  r.nodes.push_back(g.nodes.back());
  return r;
}

/// Piecewise-linear interpolation of (t, u) at the points `at`; constant
/// extrapolation outside [t.front(), t.back()].
inline std::vector<double> interpolate(const std::vector<double>& t, const std::vector<double>& u,
                                       const std::vector<double>& at) {
  if (t.size() != u.size() || t.empty())
    throw std::invalid_argument("interpolate: mismatched or empty data");
  std::vector<double> out(at.size());
  std::size_t j = 0;
  for (std::size_t i = 0; i < at.size(); ++i) {
    const double x = at[i];
    if (x <= t.front()) {
      out[i] = u.front();
      continue;
    }
    if (x >= t.back()) {
      out[i] = u.back();
      continue;
    }
    if (j > 0 && t[j] > x) j = 0;
    while (j + 1 < t.size() && t[j + 1] < x) ++j;
    const double s = (x - t[j]) / (t[j + 1] - t[j]);
    out[i] = (1.0 - s) * u[j] + s * u[j + 1];
  }
  return out;
}

}  // namespace robin

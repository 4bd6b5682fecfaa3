#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hjlab/errors.hpp"

namespace hjlab {

using Point = std::array<double, 2>;

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
  bool operator==(const Interval&) const = default;
};

/// Uniform cell-centered tensor grid over a box in one or two dimensions.
///
/// Homogeneous Neumann data are encoded by even reflection: the ghost value
/// beyond a face equals the value of the adjacent interior cell.
class Grid {
 public:
  Grid() = default;

  int dim() const { return dim_; }
  int cells(int axis) const { return n_[axis]; }
  double spacing(int axis) const { return h_[axis]; }
  double lower(int axis) const { return box_[axis].lo; }
  double upper(int axis) const { return box_[axis].hi; }
  Interval extent(int axis) const { return box_[axis]; }

  std::size_t size() const { return static_cast<std::size_t>(n_[0]) * n_[1]; }
  double cell_volume() const { return dim_ == 1 ? h_[0] : h_[0] * h_[1]; }
  double volume() const { return cell_volume() * static_cast<double>(size()); }
  double min_spacing() const { return dim_ == 1 ? h_[0] : std::min(h_[0], h_[1]); }

  /// Flat offset between neighbours along an axis.
  std::size_t stride(int axis) const { return axis == 0 ? 1 : static_cast<std::size_t>(n_[0]); }

  std::size_t index(int i, int j = 0) const {
    return static_cast<std::size_t>(i) + static_cast<std::size_t>(n_[0]) * static_cast<std::size_t>(j);
  }
  /// Cell coordinate (i or j) of flat index c along an axis.
  int coord(std::size_t c, int axis) const {
    return axis == 0 ? static_cast<int>(c % static_cast<std::size_t>(n_[0]))
                     : static_cast<int>(c / static_cast<std::size_t>(n_[0]));
  }

  double center(int axis, int i) const { return box_[axis].lo + (i + 0.5) * h_[axis]; }
  Point center_of(std::size_t c) const {
    Point x{center(0, coord(c, 0)), 0.0};
    if (dim_ == 2) x[1] = center(1, coord(c, 1));
    return x;
  }

  /// Flat index of the cell containing x (points on a face go to the upper cell, clamped).
  std::size_t locate(const Point& x) const {
    std::array<int, 2> ij{0, 0};
    for (int a = 0; a < dim_; ++a) {
      if (!(x[a] >= box_[a].lo && x[a] <= box_[a].hi))
        throw RangeError("point outside the box along axis " + std::to_string(a));
      ij[a] = std::min(n_[a] - 1, static_cast<int>(std::floor((x[a] - box_[a].lo) / h_[a])));
    }
    return index(ij[0], ij[1]);
  }

  /// Neighbour along an axis (dir = +1 or -1) with even reflection at the faces.
  std::size_t neighbor(std::size_t c, int axis, int dir) const {
    const int i = coord(c, axis);
    const int k = i + dir;
    if (k < 0 || k >= n_[axis]) return c;
    return dir > 0 ? c + stride(axis) : c - stride(axis);
  }

  bool on_boundary(std::size_t c) const {
    for (int a = 0; a < dim_; ++a) {
      const int i = coord(c, a);
      if (i == 0 || i == n_[a] - 1) return true;
    }
    return false;
  }

  /// Smallest number of cells separating c from a face (0 for boundary cells).
  int depth(std::size_t c) const {
    int d = n_[0];
    for (int a = 0; a < dim_; ++a) {
      const int i = coord(c, a);
      d = std::min({d, i, n_[a] - 1 - i});
    }
    return d;
  }

  bool operator==(const Grid&) const = default;

  friend Grid build_grid(std::span<const Interval> extents, std::span<const int> cells);

 private:
  int dim_ = 0;
  std::array<Interval, 2> box_{};
  std::array<int, 2> n_{1, 1};
  std::array<double, 2> h_{1.0, 1.0};
};

inline constexpr int kMinCellsPerAxis = 8;

inline Grid build_grid(std::span<const Interval> extents, std::span<const int> cells) {
  if (extents.empty() || extents.size() > 2 || extents.size() != cells.size())
    throw InvalidDomainError("grid must have one or two axes with matching cell counts");
  Grid g;
  g.dim_ = static_cast<int>(extents.size());
  for (int a = 0; a < g.dim_; ++a) {
    const auto [lo, hi] = extents[a];
    if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi))
      throw InvalidDomainError("degenerate interval on axis " + std::to_string(a));
    if (cells[a] < kMinCellsPerAxis)
      throw ResolutionError("axis " + std::to_string(a) + " has " + std::to_string(cells[a]) +
                            " cells, need at least " + std::to_string(kMinCellsPerAxis));
    g.box_[a] = extents[a];
    g.n_[a] = cells[a];
    g.h_[a] = (hi - lo) / cells[a];
  }
  return g;
}

inline Grid build_grid(std::initializer_list<Interval> extents, std::initializer_list<int> cells) {
  return build_grid(std::span<const Interval>(extents.begin(), extents.size()),
                    std::span<const int>(cells.begin(), cells.size()));
}

/// Same box, every axis refined by an integer factor.
inline Grid refine(const Grid& g, int factor) {
  std::vector<Interval> ext;
  std::vector<int> n;
  for (int a = 0; a < g.dim(); ++a) {
    ext.push_back(g.extent(a));
    n.push_back(g.cells(a) * factor);
  }
  return build_grid(ext, n);
}

/// One real per cell, optionally tagged with problem time.
struct ScalarField {
  Grid grid;
  std::vector<double> values;
  std::optional<double> time;

  ScalarField() = default;
  explicit ScalarField(const Grid& g, double fill = 0.0) : grid(g), values(g.size(), fill) {}
  ScalarField(const Grid& g, std::vector<double> v, std::optional<double> t = std::nullopt)
      : grid(g), values(std::move(v)), time(t) {
    if (values.size() != grid.size()) throw InputError("field length does not match the grid");
  }

  double& operator[](std::size_t c) { return values[c]; }
  double operator[](std::size_t c) const { return values[c]; }
  std::size_t size() const { return values.size(); }

  bool finite() const {
    return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
  }
};

template <typename Fn>
ScalarField sample(const Grid& g, Fn&& fn) {
  ScalarField out(g);
  for (std::size_t c = 0; c < g.size(); ++c) out[c] = fn(g.center_of(c));
  return out;
}

/// One vector per cell, stored by component.
struct VectorField {
  Grid grid;
  std::array<std::vector<double>, 2> components;

  VectorField() = default;
  explicit VectorField(const Grid& g) : grid(g) {
    for (int a = 0; a < g.dim(); ++a) components[a].assign(g.size(), 0.0);
  }
  double norm_sq(std::size_t c) const {
    double s = 0.0;
    for (int a = 0; a < grid.dim(); ++a) s += components[a][c] * components[a][c];
    return s;
  }
};

/// Backward and forward one-sided differences per axis.
struct UpwindPair {
  VectorField minus;
  VectorField plus;
};

namespace detail {

inline void require_finite(const ScalarField& u) {
  if (!u.finite()) throw InputError("field contains non-finite values");
}

inline double second_difference(std::span<const double> u, const Grid& g, std::size_t c, int a) {
  const double h = g.spacing(a);
  return (u[g.neighbor(c, a, +1)] - 2.0 * u[c] + u[g.neighbor(c, a, -1)]) / (h * h);
}

inline double mixed_difference(std::span<const double> u, const Grid& g, std::size_t c) {
  const std::size_t xp = g.neighbor(c, 0, +1), xm = g.neighbor(c, 0, -1);
  const double upp = u[g.neighbor(xp, 1, +1)], upm = u[g.neighbor(xp, 1, -1)];
  const double ump = u[g.neighbor(xm, 1, +1)], umm = u[g.neighbor(xm, 1, -1)];
  return (upp - upm - ump + umm) / (4.0 * g.spacing(0) * g.spacing(1));
}

}  // namespace detail

/// Central differences with reflected ghosts.
inline VectorField gradient(const ScalarField& u) {
  detail::require_finite(u);
  const Grid& g = u.grid;
  VectorField du(g);
  for (int a = 0; a < g.dim(); ++a) {
    const double inv = 0.5 / g.spacing(a);
    for (std::size_t c = 0; c < g.size(); ++c)
      du.components[a][c] = (u[g.neighbor(c, a, +1)] - u[g.neighbor(c, a, -1)]) * inv;
  }
  return du;
}

inline UpwindPair upwind_gradient(const ScalarField& u) {
  detail::require_finite(u);
  const Grid& g = u.grid;
  UpwindPair p{VectorField(g), VectorField(g)};
  for (int a = 0; a < g.dim(); ++a) {
    const double inv = 1.0 / g.spacing(a);
    for (std::size_t c = 0; c < g.size(); ++c) {
      p.minus.components[a][c] = (u[c] - u[g.neighbor(c, a, -1)]) * inv;
      p.plus.components[a][c] = (u[g.neighbor(c, a, +1)] - u[c]) * inv;
    }
  }
  return p;
}

inline ScalarField laplacian(const ScalarField& u) {
  detail::require_finite(u);
  const Grid& g = u.grid;
  ScalarField out(g);
  out.time = u.time;
  for (std::size_t c = 0; c < g.size(); ++c) {
    double s = 0.0;
    for (int a = 0; a < g.dim(); ++a) s += detail::second_difference(u.values, g, c, a);
    out[c] = s;
  }
  return out;
}

/// Discrete divergence of a cell-centered vector field (central, reflected).
inline ScalarField divergence(const VectorField& v) {
  const Grid& g = v.grid;
  ScalarField out(g);
  for (int a = 0; a < g.dim(); ++a) {
    const double inv = 0.5 / g.spacing(a);
    const auto& w = v.components[a];
    for (std::size_t c = 0; c < g.size(); ++c)
      out[c] += (w[g.neighbor(c, a, +1)] - w[g.neighbor(c, a, -1)]) * inv;
  }
  return out;
}

/// |D^2 u|^2: squared pure second differences plus twice the squared mixed one.
inline ScalarField hessian_frobenius_sq(const ScalarField& u) {
  detail::require_finite(u);
  const Grid& g = u.grid;
  ScalarField out(g);
  out.time = u.time;
  for (std::size_t c = 0; c < g.size(); ++c) {
    double s = 0.0;
    for (int a = 0; a < g.dim(); ++a) {
      const double d = detail::second_difference(u.values, g, c, a);
      s += d * d;
    }
    if (g.dim() == 2) {
      const double m = detail::mixed_difference(u.values, g, c);
      s += 2.0 * m * m;
    }
    out[c] = s;
  }
  return out;
}

/// Max-norm of Δ|Du|² − 2|D²u|² − 2 Du·DΔu over cells at least two cells from every face.
inline double bochner_residual(const ScalarField& u) {
  const Grid& g = u.grid;
  const VectorField du = gradient(u);
  ScalarField w(g);
  for (std::size_t c = 0; c < g.size(); ++c) w[c] = du.norm_sq(c);
  const ScalarField lap_w = laplacian(w);
  const ScalarField hess = hessian_frobenius_sq(u);
  const VectorField dlap = gradient(laplacian(u));
  double worst = 0.0;
  for (std::size_t c = 0; c < g.size(); ++c) {
    if (g.depth(c) < 2) continue;
    double dot = 0.0;
    for (int a = 0; a < g.dim(); ++a) dot += du.components[a][c] * dlap.components[a][c];
    worst = std::max(worst, std::abs(lap_w[c] - 2.0 * hess[c] - 2.0 * dot));
  }
  return worst;
}

/// Outward one-sided differences (u_face_cell − u_inner)/h, ordered
/// left, right (axis 0) then bottom, top (axis 1).
inline std::vector<double> boundary_normal_difference(const ScalarField& u) {
  detail::require_finite(u);
  const Grid& g = u.grid;
  std::vector<double> out;
  const int nx = g.cells(0);
  const int ny = g.dim() == 2 ? g.cells(1) : 1;
  const double hx = g.spacing(0);
  for (int side : {0, 1}) {
    const int i = side == 0 ? 0 : nx - 1;
    const int inner = side == 0 ? 1 : nx - 2;
    for (int j = 0; j < ny; ++j) out.push_back((u[g.index(i, j)] - u[g.index(inner, j)]) / hx);
  }
  if (g.dim() == 2) {
    const double hy = g.spacing(1);
    for (int side : {0, 1}) {
      const int j = side == 0 ? 0 : ny - 1;
      const int inner = side == 0 ? 1 : ny - 2;
      for (int i = 0; i < nx; ++i) out.push_back((u[g.index(i, j)] - u[g.index(i, inner)]) / hy);
    }
  }
  return out;
}

}  // namespace hjlab

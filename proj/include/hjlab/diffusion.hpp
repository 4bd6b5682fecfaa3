#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "hjlab/errors.hpp"
#include "hjlab/grid.hpp"

namespace hjlab {

/// Pre-factored Thomas solver for (I − a·L) on one axis, L the reflected
/// second-difference matrix. The matrix is symmetric with unit column sums.
class TridiagonalLine {
 public:
  TridiagonalLine() = default;
  TridiagonalLine(int n, double r) : r_(r), cp_(n), inv_m_(n) {
    const auto diag = [&](int i) { return (i == 0 || i == n - 1) ? 1.0 + r : 1.0 + 2.0 * r; };
    double m = diag(0);
    inv_m_[0] = 1.0 / m;
    cp_[0] = -r * inv_m_[0];
    for (int i = 1; i < n; ++i) {
      m = diag(i) + r * cp_[i - 1];
      inv_m_[i] = 1.0 / m;
      cp_[i] = -r * inv_m_[i];
    }
  }

  /// In-place solve on a strided line of length n.
  void solve(double* x, std::size_t stride) const {
    const int n = static_cast<int>(cp_.size());
    x[0] *= inv_m_[0];
    for (int i = 1; i < n; ++i) x[i * stride] = (x[i * stride] + r_ * x[(i - 1) * stride]) * inv_m_[i];
    for (int i = n - 2; i >= 0; --i) x[i * stride] -= cp_[i] * x[(i + 1) * stride];
  }

 private:
  double r_ = 0.0;
  std::vector<double> cp_;
  std::vector<double> inv_m_;
};

/// Implicit Neumann diffusion step u ← (I − a·L)⁻¹ u with a = dt·ε.
///
/// In two dimensions the operator is factored by direction,
/// (I − a·Lx)⁻¹(I − a·Ly)⁻¹; the factors commute, so the product stays
/// symmetric and mass preserving.
class NeumannDiffusion {
 public:
  NeumannDiffusion() = default;
  NeumannDiffusion(const Grid& g, double a) : grid_(g), active_(a > 0.0) {
    if (!(a >= 0.0) || !std::isfinite(a)) throw InputError("diffusion coefficient must be finite and >= 0");
    for (int ax = 0; ax < g.dim(); ++ax) {
      const double h = g.spacing(ax);
      lines_[ax] = TridiagonalLine(g.cells(ax), a / (h * h));
    }
  }

  bool active() const { return active_; }

  void apply_inverse(std::span<double> u) const {
    if (!active_) return;
    const Grid& g = grid_;
    const int nx = g.cells(0);
    if (g.dim() == 1) {
      lines_[0].solve(u.data(), 1);
    } else {
      const int ny = g.cells(1);
      for (int i = 0; i < nx; ++i) lines_[1].solve(u.data() + i, static_cast<std::size_t>(nx));
      for (int j = 0; j < ny; ++j) lines_[0].solve(u.data() + static_cast<std::size_t>(j) * nx, 1);
    }
    for (double v : u)
      if (!std::isfinite(v)) throw SolverError("implicit diffusion solve produced non-finite values");
  }

 private:
  Grid grid_;
  bool active_ = false;
  std::array<TridiagonalLine, 2> lines_;
};

}  // namespace hjlab
